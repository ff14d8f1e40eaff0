//! Seeded randomized verification suites. Every suite draws its instances
//! sequentially from a ChaCha8 stream, evaluates them in parallel and
//! reports in draw order, so a seed fixes the whole outcome.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyson::{check_dyson_inequality, check_u_admissible, DysonReport, Modulated, Radial, StarDomain};
use crate::error::Result;
use crate::lower_bound::{k_factor, nu_of_r, SoftPotential};
use crate::numerics::quadrature::Tolerance;
use crate::potentials::{Piece, Profile, RadialPotential, Weight};
use crate::profile::HermiteSpline;
use crate::scattering::{
    check_lemma_properties, integral_inequalities, min_energy_log, minimize_functional, solve_radial,
};
use crate::upper_bound::{compute_ijk, TrialFunction};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Worst value of the suite's figure of merit (slack, error, ...).
    pub worst: f64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.trials && self.failures.is_empty()
    }

    fn collect(name: &str, results: Vec<std::result::Result<f64, String>>, worst_is_max: bool) -> Self {
        let mut failures = Vec::new();
        let mut worst = if worst_is_max { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut passed = 0;
        for (i, r) in results.iter().enumerate() {
            match r {
                Ok(m) => {
                    passed += 1;
                    worst = if worst_is_max { worst.max(*m) } else { worst.min(*m) };
                }
                Err(msg) => failures.push(format!("trial {i}: {msg}")),
            }
        }
        if !worst.is_finite() {
            worst = 0.0;
        }
        SuiteOutcome {
            name: name.to_string(),
            trials: results.len(),
            passed,
            worst,
            failures,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

pub fn random_square_well(rng: &mut ChaCha8Rng) -> RadialPotential {
    let height = log_uniform(rng, 0.1, 50.0);
    let range = rng.gen_range(0.5..2.0);
    RadialPotential::square_well(height, range).expect("valid square well")
}

/// Up to four constant steps on `[core, R0]`, with an optional hard core.
pub fn random_piecewise(rng: &mut ChaCha8Rng, allow_core: bool) -> RadialPotential {
    let range: f64 = rng.gen_range(0.5..2.0);
    let core = if allow_core && rng.gen_bool(0.3) {
        rng.gen_range(0.1..0.5) * range
    } else {
        0.0
    };
    let steps = rng.gen_range(1..=4usize);
    let mut cuts: Vec<f64> = (0..steps - 1).map(|_| rng.gen_range(core..range)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![core];
    edges.extend(cuts);
    edges.push(range);
    edges.dedup();
    let pieces = edges
        .windows(2)
        .map(|w| Piece::new(w[0], w[1], Profile::Constant(log_uniform(rng, 0.05, 50.0))))
        .collect();
    RadialPotential::piecewise(core, pieces).expect("valid piecewise potential")
}

pub fn random_potential(rng: &mut ChaCha8Rng, allow_core: bool) -> RadialPotential {
    if rng.gen_bool(0.5) {
        random_square_well(rng)
    } else {
        random_piecewise(rng, allow_core)
    }
}

/// Positive C¹ spline on `[lo, hi]`; it starts at zero when `vanish_at_lo`.
pub fn random_spline(rng: &mut ChaCha8Rng, lo: f64, hi: f64, vanish_at_lo: bool) -> HermiteSpline {
    let n = rng.gen_range(4..=8usize);
    let knots: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let h = (hi - lo) / (n - 1) as f64;
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let mut slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if vanish_at_lo {
        values[0] = 0.0;
        slopes[0] = rng.gen_range(0.5..2.0) * values[1] / h;
    }
    // a slope below value/(3h) in size keeps each cubic piece positive
    for i in 0..n {
        let cap = values[i] / (3.0 * h);
        if i > 0 || !vanish_at_lo {
            slopes[i] = slopes[i].clamp(-cap, cap);
        }
    }
    HermiteSpline::new(knots, values, slopes)
}

/// `minimize_functional` against `min_energy` for `R/R0 ∈ {2, 10}`.
pub fn variational_suite(seed: u64, trials: usize, mu: f64, grid: usize, rel_tol: f64) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<RadialPotential> = (0..trials).map(|_| random_potential(&mut g, true)).collect();
    let results = cases
        .par_iter()
        .map(|v| -> std::result::Result<f64, String> {
            let sol = solve_radial(v, mu, 2).map_err(|e| e.to_string())?;
            let mut worst: f64 = 0.0;
            for factor in [2.0, 10.0] {
                let big_r = factor * v.range();
                let exact = min_energy_log(sol.ln_a(), big_r, mu).map_err(|e| e.to_string())?;
                let fem = minimize_functional(v, big_r, mu, 2, grid).map_err(|e| e.to_string())?;
                let rel = (fem.energy / exact - 1.0).abs();
                if !(rel <= rel_tol) {
                    return Err(format!("R = {big_r}: relative gap {rel:.3e}"));
                }
                worst = worst.max(rel);
            }
            Ok(worst)
        })
        .collect();
    SuiteOutcome::collect("variational", results, true)
}

/// `∫v` against its lower bound in dimension `n` (`4πμ/ln(R0/a)` in two
/// dimensions) on random soft wells.
pub fn inequality_suite(seed: u64, trials: usize, mu: f64, n: u32) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<RadialPotential> = (0..trials).map(|_| random_potential(&mut g, false)).collect();
    let results = cases
        .par_iter()
        .map(|v| {
            let rep = integral_inequalities(v, mu, n).map_err(|e| e.to_string())?;
            if rep.holds() {
                Ok(rep.slack)
            } else {
                Err(format!("slack {:.3e}", rep.slack))
            }
        })
        .collect();
    SuiteOutcome::collect("integral inequality", results, false)
}

/// `(∫λv) ln(R0/a(λ)) / (4πμ)`, which tends to 1 as `λ → 0`.
pub fn weak_coupling_ratio(v: &RadialPotential, mu: f64, lambda: f64) -> Result<f64> {
    let scaled = v.scaled(lambda)?;
    let sol = solve_radial(&scaled, mu, 2)?;
    let integral = 2.0 * PI * scaled.radial_moment(Weight::One, 0.0, scaled.range())?;
    Ok(integral * (scaled.range().ln() - sol.ln_a()) / (4.0 * PI * mu))
}

/// Minimizer properties, with a pointwise smaller comparison potential.
pub fn lemma_suite(seed: u64, trials: usize, mu: f64) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<(RadialPotential, f64, f64)> = (0..trials)
        .map(|_| {
            let v = random_potential(&mut g, true);
            let shrink = g.gen_range(0.1..1.0);
            let factor = g.gen_range(1.5..10.0);
            (v, shrink, factor)
        })
        .collect();
    let results = cases
        .par_iter()
        .map(|(v, shrink, factor)| {
            let smaller = if v.has_hard_core() {
                RadialPotential::square_well(10.0, v.range()).map_err(|e| e.to_string())?
            } else {
                v.scaled(*shrink).map_err(|e| e.to_string())?
            };
            let comparison = if v.dominates(&smaller) { Some(&smaller) } else { None };
            let rep = check_lemma_properties(v, comparison, mu, 2, factor * v.range()).map_err(|e| e.to_string())?;
            if rep.all_hold() {
                let mut m = rep.lower_bound_margin.min(rep.monotone_margin);
                if let Some(c) = &rep.comparison {
                    m = m.min(c.profile_margin).min(c.length_margin);
                }
                Ok(m)
            } else {
                Err(format!("{rep:?}"))
            }
        })
        .collect();
    SuiteOutcome::collect("minimizer properties", results, false)
}

/// Closed-form `J` against its quadrature.
pub fn j_exactness_suite(seed: u64, trials: usize, mu: f64, rel_tol: f64) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<(RadialPotential, f64)> = (0..trials)
        .map(|_| (random_potential(&mut g, true), g.gen_range(1.2..20.0)))
        .collect();
    let results = cases
        .par_iter()
        .map(|(v, factor)| {
            let sol = solve_radial(v, mu, 2).map_err(|e| e.to_string())?;
            let trial = TrialFunction::new(&sol, factor * v.range()).map_err(|e| e.to_string())?;
            let ijk = compute_ijk(&trial);
            let rel = (ijk.j_quadrature / ijk.j - 1.0).abs();
            if rel <= rel_tol {
                Ok(rel)
            } else {
                Err(format!("b = {}: relative gap {rel:.3e}", trial.b()))
            }
        })
        .collect();
    SuiteOutcome::collect("J exactness", results, true)
}

/// `∫U ln(r/a) r dr = 1` for `U_R`, and `ν(R0) = 0`.
pub fn normalization_suite(seed: u64, trials: usize, quadrature_tol: f64, tol: f64) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<(f64, f64, f64)> = (0..trials)
        .map(|_| {
            let r0 = g.gen_range(0.5..2.0);
            let a = r0 * g.gen_range(0.01..1.0);
            let r = r0 * g.gen_range(1.01..20.0);
            (a, r0, r)
        })
        .collect();
    let results = cases
        .par_iter()
        .map(|&(a, r0, r)| {
            let zero = nu_of_r(r0, r0, a).map_err(|e| e.to_string())?;
            if zero != 0.0 {
                return Err(format!("nu(R0) = {zero}"));
            }
            let u = SoftPotential::new(r0, r, a)
                .and_then(|s| s.to_potential())
                .map_err(|e| e.to_string())?;
            let m = u
                .radial_moment_with(Weight::Log { a }, 0.0, r, Tolerance::absolute(quadrature_tol))
                .map_err(|e| e.to_string())?;
            let err = (m - 1.0).abs();
            if err <= tol {
                Ok(err)
            } else {
                Err(format!("(a, R0, R) = ({a}, {r0}, {r}): moment {m}"))
            }
        })
        .collect();
    SuiteOutcome::collect("U normalization", results, true)
}

/// `K(n)` strictly decreasing over `n = 2..=n_max` for random parameters
/// whose Temple denominator stays positive up to `n_max`.
pub fn k_monotone_suite(seed: u64, trials: usize, n_max: u32) -> SuiteOutcome {
    let mut g = rng(seed);
    let nm = n_max as f64;
    let results = (0..trials)
        .map(|_| {
            let eps = g.gen_range(0.05..0.95);
            let r_over_ell = g.gen_range(0.0..0.45);
            let q = log_uniform(&mut g, 1e-7, 1e-4);
            let need = nm + nm * (nm - 1.0) * q;
            let nu_over_ell2 = need / eps * g.gen_range(1.5..20.0);
            let ks: Vec<f64> = (2..=n_max).map(|n| k_factor(eps, r_over_ell, nu_over_ell2, q, n as f64)).collect();
            let worst = ks.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            if worst > 0.0 && ks.iter().all(|k| *k > 0.0) {
                Ok(worst)
            } else {
                Err(format!("eps {eps}, R/l {r_over_ell}, nu/l^2 {nu_over_ell2}, Q {q}: min decrement {worst:.3e}"))
            }
        })
        .collect();
    SuiteOutcome::collect("K monotone", results, false)
}

/// One random instance of the Dyson check on a disc.
#[derive(Debug, Clone)]
pub struct DysonCase {
    pub v: RadialPotential,
    pub u_inner: f64,
    pub u_outer: f64,
    pub u_scale: f64,
    pub disc: f64,
    pub profile: HermiteSpline,
    pub amplitude: f64,
}

pub fn random_dyson_case(g: &mut ChaCha8Rng) -> DysonCase {
    let v = random_potential(g, true);
    let r0 = v.range();
    let u_inner = r0 * g.gen_range(1.0..3.0);
    let u_outer = u_inner + r0 * g.gen_range(0.1..4.0);
    let disc = r0 * g.gen_range(0.5..8.0);
    let core = v.hard_core_radius();
    let profile = random_spline(g, core, disc * 1.2, core > 0.0);
    DysonCase {
        v,
        u_inner,
        u_outer,
        u_scale: g.gen_range(0.05..1.0),
        disc,
        profile,
        amplitude: g.gen_range(0.0..0.9),
    }
}

pub fn run_dyson_case(case: &DysonCase, mu: f64, n_angles: usize) -> Result<DysonReport> {
    let sol = solve_radial(&case.v, mu, 2)?;
    let u = SoftPotential::new(case.u_inner, case.u_outer, sol.a())?
        .to_potential()?
        .scaled(case.u_scale)?;
    let phi = Modulated {
        profile: case.profile.clone(),
        amplitude: case.amplitude,
    };
    check_dyson_inequality(&phi, &StarDomain::disc(case.disc), &case.v, &u, mu, sol.a(), n_angles)
}

/// Random `(φ, U, v)` triples on discs; the figure of merit is the smallest
/// per-ray slack.
pub fn dyson_suite(seed: u64, trials: usize, mu: f64, n_angles: usize, tol: f64) -> SuiteOutcome {
    let mut g = rng(seed);
    let cases: Vec<DysonCase> = (0..trials).map(|_| random_dyson_case(&mut g)).collect();
    let results = cases
        .par_iter()
        .map(|c| {
            let rep = run_dyson_case(c, mu, n_angles).map_err(|e| e.to_string())?;
            if rep.min_slack >= tol && rep.total_slack >= tol {
                Ok(rep.min_slack)
            } else {
                Err(format!("min slack {:.3e}", rep.min_slack))
            }
        })
        .collect();
    SuiteOutcome::collect("Dyson inequality", results, false)
}

/// Minimizer normalized at `R` against a thin shell at `R`: both sides
/// agree up to the shell width.
pub fn dyson_equality_case(v: &RadialPotential, mu: f64, big_r: f64, width: f64, n_angles: usize) -> Result<DysonReport> {
    let sol = solve_radial(v, mu, 2)?.renormalized(big_r)?;
    let u = SoftPotential::shell(big_r, sol.a(), width)?.to_potential()?;
    let adm = check_u_admissible(&u, sol.a(), v.range())?;
    debug_assert!(adm.admissible, "{adm:?}");
    let a = sol.a();
    check_dyson_inequality(&Radial(sol), &StarDomain::disc(big_r), v, &u, mu, a, n_angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::RadialProfile;

    #[test]
    fn generators_are_deterministic() {
        let a: Vec<f64> = {
            let mut g = rng(7);
            (0..5).map(|_| random_potential(&mut g, true).range()).collect()
        };
        let b: Vec<f64> = {
            let mut g = rng(7);
            (0..5).map(|_| random_potential(&mut g, true).range()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn splines_are_positive() {
        let mut g = rng(3);
        for _ in 0..50 {
            let s = random_spline(&mut g, 0.2, 3.0, true);
            assert_eq!(s.value(0.2), 0.0);
            for i in 1..=400 {
                let r = 0.2 + 2.8 * i as f64 / 400.0;
                assert!(s.value(r) > 0.0, "{r}");
            }
        }
    }

    #[test]
    fn small_suites_pass() {
        assert!(normalization_suite(1, 20, 1e-13, 1e-10).ok());
        assert!(k_monotone_suite(1, 5, 100).ok());
        assert!(inequality_suite(1, 10, 1.0, 2).ok() && inequality_suite(2, 10, 1.0, 3).ok());
        assert!(j_exactness_suite(1, 5, 1.0, 1e-8).ok());
        let d = dyson_suite(1, 5, 1.0, 16, -1e-8);
        assert!(d.ok(), "{:?}", d.failures);
    }

    #[test]
    fn equality_case_is_tight() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let rep = dyson_equality_case(&v, 1.0, 3.0, 1e-8, 8).unwrap();
        assert!(rep.min_slack.abs() < 1e-6, "{}", rep.min_slack);
        assert!(rep.angles.iter().all(|c| c.rhs > 0.0));
    }

    #[test]
    fn weak_coupling_tends_to_one() {
        let v = RadialPotential::square_well(1.0, 1.0).unwrap();
        let r = weak_coupling_ratio(&v, 1.0, 1e-4).unwrap();
        assert!((r - 1.0).abs() < 0.02, "{r}");
    }
}
