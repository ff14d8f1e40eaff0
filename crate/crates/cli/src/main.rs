use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bose2d::asymptotics::to_csv;
use bose2d::lower_bound::{optimize_lower_bound, scheduled_report};
use bose2d::scattering::infinite_range_a;
use bose2d::suites::{self, SuiteOutcome};
use bose2d::upper_bound::optimize_b_with;
use bose2d::{emit_report, run_sweep, solve_radial_with, Error, GasParameters, PotentialSpec, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bose2d", version, about = "Energy bounds for the dilute two-dimensional Bose gas")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// hard_disc:R, square_well:HEIGHT,RANGE, power_tail:CUTOFF,COEF,EXP or inline JSON
    #[arg(long, global = true)]
    potential: Option<String>,
    /// ħ²/2m
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// particle density
    #[arg(long, global = true, conflicts_with = "rho_a2")]
    rho: Option<f64>,
    /// dimensionless density ρa²
    #[arg(long = "rho-a2", global = true)]
    rho_a2: Option<f64>,
    /// output file, or output directory for `sweep`
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// exit with status 1 unless every result is valid
    #[arg(long, global = true)]
    assert: bool,
    /// spatial dimension for `scattering-length` and `verify inequalities`
    #[arg(long, global = true)]
    dimension: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Zero-energy scattering length of the potential
    ScatteringLength,
    /// Variational upper bound at one density
    UpperBound,
    /// Optimized and scheduled lower bounds at one density
    LowerBound,
    /// Bounds over a list of densities, written as CSV and plot data
    Sweep,
    /// Randomized verification suites
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Dyson,
    Lemmas,
    Inequalities,
}

/// Result of a subcommand: what to print and whether everything was valid.
struct Outcome {
    json: Value,
    csv: String,
    valid: bool,
}

fn resolve_config(c: &Common) -> bose2d::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &c.potential {
        cfg.potential = p.parse::<PotentialSpec>()?;
    }
    if let Some(mu) = c.mu {
        cfg.mu = mu;
    }
    if c.rho.is_some() {
        cfg.rho = c.rho;
        cfg.rho_a2 = None;
    }
    if c.rho_a2.is_some() {
        cfg.rho_a2 = c.rho_a2;
        cfg.rho = None;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(d) = c.dimension {
        cfg.dimension = d;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn csv_line(values: &[String]) -> String {
    values.join(",")
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        String::new()
    }
}

fn scattering_length(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let v = cfg.potential.build()?;
    let opts = cfg.solver_options();
    let n = cfg.dimension;
    let (sol, method, extrapolation) = if v.tail().is_some() {
        let r0 = v.range();
        let cutoffs: Vec<f64> = (1..=6).map(|k| r0 * 2f64.powi(k)).collect();
        let limit = infinite_range_a(&v, cfg.mu, n, &cutoffs)?;
        let last = v.truncated(*cutoffs.last().unwrap())?;
        let sol = solve_radial_with(&last, cfg.mu, n, &opts)?;
        (sol, "shooting on truncations with Aitken extrapolation", Some(limit))
    } else {
        (solve_radial_with(&v, cfg.mu, n, &opts)?, "adaptive Dormand-Prince shooting", None)
    };
    let (f, df) = sol.boundary();
    let a = extrapolation.as_ref().map_or(sol.a(), |e| e.limit);
    let ln_a = sol.ln_a();
    let json = json!({
        "n": n,
        "a": a,
        "ln_a": if ln_a.is_finite() { json!(ln_a) } else { Value::Null },
        "f0_at_R0": f,
        "df0_at_R0": df,
        "R0": sol.range(),
        "method": method,
        "tolerances": { "rtol": opts.rtol, "atol": opts.atol },
        "truncation": extrapolation,
    });
    let csv = format!(
        "n,a,f0_at_R0,df0_at_R0,method\n{}\n",
        csv_line(&[n.to_string(), fmt(a), fmt(f), fmt(df), method.to_string()])
    );
    Ok(Outcome { json, csv, valid: true })
}

fn gas_for(cfg: &RunConfig, ln_a: f64) -> bose2d::Result<GasParameters> {
    GasParameters::new(cfg.mu, cfg.density(ln_a)?)
}

fn upper_bound(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let v = cfg.potential.build()?;
    let sol = solve_radial_with(&v, cfg.mu, 2, &cfg.solver_options())?;
    let gas = gas_for(cfg, sol.ln_a())?;
    let rep = optimize_b_with(&gas, &sol, cfg.tolerances.optimizer)?;
    let csv = format!(
        "rho_a2,a,b_opt,upper,asymptote,upper_ratio,rho_i\n{}\n",
        csv_line(&[
            fmt(rep.ln_rho_a2.exp()),
            fmt(sol.a()),
            fmt(rep.b),
            fmt(rep.energy_per_particle),
            fmt(rep.leading_term),
            fmt(rep.ratio),
            fmt(rep.rho_i),
        ])
    );
    Ok(Outcome {
        json: json!({ "a": sol.a(), "rho": gas.rho, "report": rep }),
        csv,
        valid: true,
    })
}

fn lower_bound(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let v = cfg.potential.build()?;
    if v.tail().is_some() {
        return Err(Error::Config("bounds need a compactly supported potential".into()).into());
    }
    let sol = solve_radial_with(&v, cfg.mu, 2, &cfg.solver_options())?;
    let gas = gas_for(cfg, sol.ln_a())?;
    let r0 = v.range();
    let optimized = optimize_lower_bound(&gas, sol.ln_a(), r0, &cfg.schedule);
    let scheduled = scheduled_report(&gas, sol.ln_a(), r0, &cfg.schedule);
    // domain errors (ρa² too large) apply to both and abort
    for r in [&optimized, &scheduled] {
        if let Err(e @ Error::Domain(_)) = r {
            return Err(e.clone().into());
        }
    }
    let part = |r: &bose2d::Result<bose2d::LowerBoundReport>| match r {
        Ok(rep) => json!({ "report": rep }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let row = |kind: &str, r: &bose2d::Result<bose2d::LowerBoundReport>| match r {
        Ok(rep) => csv_line(&[
            kind.to_string(),
            rep.valid.to_string(),
            fmt(rep.params.epsilon),
            fmt(rep.params.ell),
            fmt(rep.params.r),
            rep.params.n_cell.to_string(),
            rep.energy_per_particle.map_or(String::new(), fmt),
            rep.leading_ratio.map_or(String::new(), fmt),
            rep.failed.join(";"),
        ]),
        Err(e) => csv_line(&[kind.to_string(), "false".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), e.to_string().replace(',', ";")]),
    };
    let valid = matches!(&optimized, Ok(r) if r.valid);
    let json = json!({
        "a": sol.a(),
        "rho": gas.rho,
        "optimized": part(&optimized),
        "scheduled": part(&scheduled),
    });
    let csv = format!(
        "kind,valid,eps,ell,R,n_cell,lower,lower_ratio,failed\n{}\n{}\n",
        row("optimized", &optimized),
        row("scheduled", &scheduled)
    );
    Ok(Outcome { json, csv, valid })
}

fn sweep(cfg: &RunConfig) -> anyhow::Result<(Outcome, Vec<PathBuf>)> {
    let spec = cfg.sweep_spec()?;
    let table = run_sweep(&spec)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = emit_report(&table, &dir)?;
    let outcome = Outcome {
        json: serde_json::to_value(&table)?,
        csv: to_csv(&table),
        valid: table.passes(),
    };
    Ok((outcome, files))
}

fn verify(cfg: &RunConfig, suite: Suite) -> anyhow::Result<Outcome> {
    let (seed, trials, mu) = (cfg.seed, cfg.trials, cfg.mu);
    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    let mut extra = serde_json::Map::new();
    let mut extra_ok = true;
    match suite {
        Suite::Dyson => {
            outcomes.push(suites::dyson_suite(seed, trials, mu, 64, bose2d::dyson::SLACK_TOLERANCE));
            outcomes.push(suites::normalization_suite(seed, trials, cfg.tolerances.quadrature, 1e-10));
            let v = cfg.potential.build()?;
            let big_r = 3.0 * v.range();
            let eq = suites::dyson_equality_case(&v, mu, big_r, 1e-8, 64)?;
            extra_ok &= eq.min_slack.abs() <= 1e-6;
            extra.insert(
                "equality_case".into(),
                json!({ "R": big_r, "min_slack": eq.min_slack, "total_slack": eq.total_slack }),
            );
        }
        Suite::Lemmas => {
            outcomes.push(suites::lemma_suite(seed, trials, mu));
            outcomes.push(suites::variational_suite(seed, trials.min(20), mu, 4096, 1e-4));
            outcomes.push(suites::j_exactness_suite(seed, trials.min(20), mu, 1e-8));
            outcomes.push(suites::k_monotone_suite(seed, trials.min(20), 100));
        }
        Suite::Inequalities => {
            outcomes.push(suites::inequality_suite(seed, trials, mu, cfg.dimension));
            if cfg.dimension == 2 {
                let v = bose2d::RadialPotential::square_well(1.0, 1.0)?;
                let ratio = suites::weak_coupling_ratio(&v, mu, 1e-4)?;
                extra_ok &= (ratio - 1.0).abs() <= 0.02;
                extra.insert("weak_coupling".into(), json!({ "lambda": 1e-4, "ratio": ratio }));
            }
        }
    }
    let valid = extra_ok && outcomes.iter().all(SuiteOutcome::ok);
    let mut csv = String::from("suite,trials,passed,worst\n");
    for o in &outcomes {
        csv.push_str(&csv_line(&[o.name.clone(), o.trials.to_string(), o.passed.to_string(), fmt(o.worst)]));
        csv.push('\n');
    }
    Ok(Outcome {
        json: json!({ "seed": seed, "suites": outcomes, "checks": extra, "passed": valid }),
        csv,
        valid,
    })
}

fn render(outcome: &Outcome, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json)?;
            s.push('\n');
            s
        }
        Format::Csv => outcome.csv.clone(),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = resolve_config(&cli.common)?;
    let format = cli.common.format;
    let (outcome, to_file) = match cli.command {
        Command::ScatteringLength => (scattering_length(&cfg)?, true),
        Command::UpperBound => (upper_bound(&cfg)?, true),
        Command::LowerBound => (lower_bound(&cfg)?, true),
        Command::Verify { suite } => (verify(&cfg, suite)?, true),
        Command::Sweep => {
            let (outcome, files) = sweep(&cfg)?;
            for f in &files {
                eprintln!("wrote {}", f.display());
            }
            (outcome, false)
        }
    };
    let text = render(&outcome, format)?;
    match (&cfg.out, to_file) {
        (Some(path), true) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        _ => print!("{text}"),
    }
    let strict = cli.common.assert || matches!(cli.command, Command::Verify { .. });
    Ok(!strict || outcome.valid)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(n) = std::env::var("BOSE2D_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: BOSE2D_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
