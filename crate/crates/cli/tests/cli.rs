use std::process::Command;

fn bose2d(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bose2d")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn hard_disc_length_json() {
    let (code, out) = bose2d(&["scattering-length", "--potential", "hard_disc:1.0", "--mu", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["a"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    for key in ["n", "f0_at_R0", "df0_at_R0", "method", "tolerances"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(bose2d(&["no-such-command"]).0, 2);
    assert_eq!(bose2d(&["upper-bound", "--unknown-flag"]).0, 2);
    assert_eq!(bose2d(&["upper-bound", "--potential", "square_well:1"]).0, 2);
    assert_eq!(bose2d(&["upper-bound", "--rho-a2", "0.5"]).0, 1);
    assert_eq!(bose2d(&["upper-bound", "--rho-a2", "1e-20"]).0, 0);
}

#[test]
fn lower_bound_assert() {
    assert_eq!(bose2d(&["lower-bound", "--rho-a2", "1e-300", "--assert"]).0, 0);
    assert_eq!(bose2d(&["lower-bound", "--rho-a2", "1e-10", "--assert"]).0, 1);
}

#[test]
fn sweep_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let (code, stdout) = bose2d(&["sweep", "--potential", "hard_disc:1", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("rho_a2,a,b_opt,upper,eps,ell,R,lower,asymptote,upper_ratio,lower_ratio,flags,sched_lower,sched_ratio\n"));
    assert_eq!(std::fs::read_to_string(out.join("sweep.csv")).unwrap(), stdout);
    assert!(out.join("plot.dat").exists());
}

#[test]
fn verify_suites_pass() {
    for suite in ["dyson", "inequalities"] {
        let (code, out) = bose2d(&["verify", suite, "--trials", "10", "--seed", "3"]);
        assert_eq!(code, 0, "{suite}: {out}");
    }
}
