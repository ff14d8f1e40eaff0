//! Variational upper bound on the energy per particle.
//!
//! The trial pair function is the zero-energy solution normalized at a
//! cutoff `b` and held at 1 beyond it. Its integrals `I`, `J`, `K` enter
//! `ρJ/(1-ρI) + (2/3)μ(ρK)²/(1-ρI)²`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::optimize::golden_section;
use crate::potentials::GasParameters;
use crate::profile::RadialProfile;
use crate::scattering::ScatteringSolution;

/// `ρI` above which a report is flagged as close to inadmissible.
pub const NEAR_INADMISSIBLE: f64 = 0.95;

const BOUNDARY_NOTE: &str = "bound is per particle in the thermodynamic limit; \
the O(L^-2) cost of periodic instead of Dirichlet conditions is not added";

/// `f(r) = f0(r)/f0(b)` for `r <= b`, 1 beyond.
#[derive(Debug, Clone)]
pub struct TrialFunction {
    b: f64,
    solution: ScatteringSolution,
}

impl TrialFunction {
    pub fn new(solution: &ScatteringSolution, b: f64) -> Result<Self> {
        if solution.dimension() != 2 {
            return Err(Error::Domain("the upper bound is two-dimensional".into()));
        }
        if !(b > solution.range()) || !b.is_finite() {
            return Err(Error::Precondition(format!(
                "cutoff b = {b} must exceed the range R0 = {}",
                solution.range()
            )));
        }
        if solution.ln_a() == f64::NEG_INFINITY {
            return Err(Error::Domain("scattering length is zero; the bound is degenerate".into()));
        }
        Ok(Self {
            b,
            solution: solution.renormalized(b)?,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn solution(&self) -> &ScatteringSolution {
        &self.solution
    }

    /// `ln(b/a)`
    pub fn log_ratio(&self) -> f64 {
        self.b.ln() - self.solution.ln_a()
    }
}

impl RadialProfile for TrialFunction {
    fn value(&self, r: f64) -> f64 {
        if r >= self.b {
            1.0
        } else {
            self.solution.f0(r)
        }
    }
    fn derivative(&self, r: f64) -> f64 {
        if r >= self.b {
            0.0
        } else {
            self.solution.df0(r)
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.solution.breakpoints();
        b.push(self.b);
        b
    }
}

/// The three trial-function integrals, plus `J` computed as a quadrature
/// of the energy density instead of the boundary term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Ijk {
    /// `2π∫(1-f²) r dr`
    pub i: f64,
    /// `2πμ b f(b) f'(b)`
    pub j: f64,
    /// `2π∫ f f' r dr`
    pub k: f64,
    /// `2π∫(μf'² + v f²/2) r dr`
    pub j_quadrature: f64,
}

/// `∫ r ln²(r/a) dr` with `l = ln(r/a)`.
fn e2(r: f64, l: f64) -> f64 {
    0.5 * r * r * (l * l - l + 0.5)
}

/// `∫ ln²(r/a) dr` with `l = ln(r/a)`.
fn e1(r: f64, l: f64) -> f64 {
    r * (l * l - 2.0 * l + 2.0)
}

/// Integrals for the trial function. Inside the range they come from
/// quadrature over the sampled solution; the logarithmic exterior is
/// integrated in closed form. Returns `L = ln(b/a)`, the range-dependent
/// parts of `I` and `K`, and both forms of `J`.
fn integrals(trial: &TrialFunction) -> (f64, f64, f64, f64, f64) {
    let s = &trial.solution;
    let r0 = s.range();
    let big_l = trial.log_ratio();
    let l0 = r0.ln() - s.ln_a();
    // f = ln(r/a)/L outside the range
    let inv_l2 = 1.0 / (big_l * big_l);
    let inner_i = 2.0 * PI * (inv_l2 * e2(r0, l0) - s.moment(1));
    let inner_k = PI * (inv_l2 * e1(r0, l0) - s.moment(0));
    let slope = s.exterior_slope();
    let j = 2.0 * PI * s.mu() * slope;
    let j_quad = 2.0 * PI * (s.interior_energy() + s.mu() * slope * slope * (trial.b / r0).ln());
    (big_l, inner_i, inner_k, j, j_quad)
}

pub fn compute_ijk(trial: &TrialFunction) -> Ijk {
    let (big_l, inner_i, inner_k, j, j_quadrature) = integrals(trial);
    let b = trial.b;
    let l2 = big_l * big_l;
    Ijk {
        i: PI * b * b * (big_l - 0.5) / l2 + inner_i,
        j,
        k: PI * b * (2.0 * big_l - 2.0) / l2 + inner_k,
        j_quadrature,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperErrorTerms {
    /// `ρJ/(1-ρI)`
    pub kinetic: f64,
    /// `(2/3)μ(ρK)²/(1-ρI)²`
    pub three_body: f64,
    /// `ρJ/(1-ρI) - ρJ`
    pub denominator: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundReport {
    pub energy_per_particle: f64,
    pub b: f64,
    /// `b (2πρ)^{1/2}`
    pub b_scaled: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub j_quadrature: f64,
    pub rho_i: f64,
    pub near_inadmissible: bool,
    pub ln_rho_a2: f64,
    /// `4πμρ/|ln(ρa²)|`
    pub leading_term: f64,
    /// `energy_per_particle / leading_term`
    pub ratio: f64,
    pub error_terms: UpperErrorTerms,
    pub note: String,
}

/// Bound evaluated at cutoff `b`. Works with `ρb²` and `ρb` directly so
/// that very small densities do not overflow.
pub fn bound_at_b(params: &GasParameters, solution: &ScatteringSolution, b: f64) -> Result<UpperBoundReport> {
    let ln_rho_a2 = params.ln_rho_a2(solution.ln_a());
    if !(ln_rho_a2 < 0.0) {
        return Err(Error::Domain(format!("need rho a^2 < 1, got ln(rho a^2) = {ln_rho_a2}")));
    }
    let trial = TrialFunction::new(solution, b)?;
    let (big_l, inner_i, inner_k, j, j_quadrature) = integrals(&trial);
    let rho = params.rho;
    let mu = params.mu;
    let sqrt_rho = rho.sqrt();
    let beta = b * sqrt_rho;
    let l2 = big_l * big_l;
    let rho_i = PI * beta * beta * (big_l - 0.5) / l2 + rho * inner_i;
    let rho_k = PI * beta * sqrt_rho * (2.0 * big_l - 2.0) / l2 + rho * inner_k;
    if !(rho_i < 1.0) {
        return Err(Error::Inadmissible { b, rho_i });
    }
    let denom = 1.0 - rho_i;
    let kinetic = rho * j / denom;
    let three_body = 2.0 / 3.0 * mu * rho_k * rho_k / (denom * denom);
    let energy = kinetic + three_body;
    let leading = asymptotic_upper_log(params, solution.ln_a())?;
    Ok(UpperBoundReport {
        energy_per_particle: energy,
        b,
        b_scaled: beta * (2.0 * PI).sqrt(),
        i: rho_i / rho,
        j,
        k: rho_k / rho,
        j_quadrature,
        rho_i,
        near_inadmissible: rho_i > NEAR_INADMISSIBLE,
        ln_rho_a2,
        leading_term: leading,
        ratio: energy / leading,
        error_terms: UpperErrorTerms {
            kinetic,
            three_body,
            denominator: kinetic - rho * j,
        },
        note: BOUNDARY_NOTE.into(),
    })
}

/// Number of points in the initial logarithmic scan over `b`.
const SCAN_POINTS: usize = 160;

/// Minimizes the bound over `b ∈ (R0, 10 (2πρ)^{-1/2}]`: a logarithmic scan,
/// then golden-section refinement in `ln b`, then a comparison with the
/// bound at `b = (2πρ)^{-1/2}`.
pub fn optimize_b(params: &GasParameters, solution: &ScatteringSolution) -> Result<UpperBoundReport> {
    optimize_b_with(params, solution, 1e-6)
}

/// As [`optimize_b`] with the golden-section tolerance on `ln b` given.
pub fn optimize_b_with(params: &GasParameters, solution: &ScatteringSolution, tol: f64) -> Result<UpperBoundReport> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let ln_rho_a2 = params.ln_rho_a2(solution.ln_a());
    if !(ln_rho_a2 < 0.0) {
        return Err(Error::Domain(format!("need rho a^2 < 1, got ln(rho a^2) = {ln_rho_a2}")));
    }
    let r0 = solution.range();
    let b0 = 1.0 / (2.0 * PI * params.rho).sqrt();
    if !(r0 < b0) {
        return Err(Error::Precondition(format!(
            "range R0 = {r0} must be below (2 pi rho)^(-1/2) = {b0}"
        )));
    }
    let lo = (r0 * (1.0 + 1e-9)).ln();
    let hi = (10.0 * b0).ln();
    let objective = |x: f64| -> f64 {
        bound_at_b(params, solution, x.exp())
            .map(|r| r.energy_per_particle)
            .unwrap_or(f64::INFINITY)
    };
    let grid: Vec<(f64, f64)> = (0..SCAN_POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64;
            (x, objective(x))
        })
        .collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, p)| (i, p.1))
        .unwrap();
    if !grid[best].1.is_finite() {
        return Err(Error::Infeasible(format!(
            "rho I >= 1 for every b in ({r0}, {}]",
            10.0 * b0
        )));
    }
    let left = grid[best.saturating_sub(1)].0;
    let right = grid[(best + 1).min(SCAN_POINTS - 1)].0;
    let (x_star, f_star) = golden_section(objective, left, right, tol);
    let mut candidates = vec![(grid[best].0, grid[best].1), (x_star, f_star)];
    candidates.push((b0.ln(), objective(b0.ln())));
    let (x_opt, _) = candidates
        .into_iter()
        .filter(|c| c.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let b_opt = if (x_opt - b0.ln()).abs() == 0.0 { b0 } else { x_opt.exp() };
    bound_at_b(params, solution, b_opt)
}

/// `4πμρ/|ln(ρa²)|`; requires `ρa² < 1`.
pub fn asymptotic_upper(params: &GasParameters, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("scattering length must be positive, got {a}")));
    }
    asymptotic_upper_log(params, a.ln())
}

/// As [`asymptotic_upper`] with `ln a` given.
pub fn asymptotic_upper_log(params: &GasParameters, ln_a: f64) -> Result<f64> {
    let x = params.ln_rho_a2(ln_a);
    if !(x < 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("need 0 < rho a^2 < 1, got ln(rho a^2) = {x}")));
    }
    Ok(4.0 * PI * params.mu * params.rho / -x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_with_breaks, Tolerance};
    use crate::potentials::RadialPotential;
    use crate::scattering::solve_radial;
    use std::f64::consts::E;

    fn disc() -> ScatteringSolution {
        solve_radial(&RadialPotential::hard_disc(1.0).unwrap(), 1.0, 2).unwrap()
    }

    #[test]
    fn hard_disc_j_closed_form() {
        let t = TrialFunction::new(&disc(), E).unwrap();
        let ijk = compute_ijk(&t);
        assert!((ijk.j - 2.0 * PI).abs() < 1e-12);
        assert!((ijk.j_quadrature / ijk.j - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hard_disc_integrals_match_quadrature() {
        let b = 7.5;
        let t = TrialFunction::new(&disc(), b).unwrap();
        let ijk = compute_ijk(&t);
        let l = b.ln();
        let closed_i = PI * b * b * (l - 0.5) / (l * l) + PI / (2.0 * l * l);
        let closed_k = PI * b * (2.0 * l - 2.0) / (l * l) + 2.0 * PI / (l * l);
        assert!((ijk.i / closed_i - 1.0).abs() < 1e-12);
        assert!((ijk.k / closed_k - 1.0).abs() < 1e-12);
        let tol = Tolerance::absolute(1e-13);
        let qi = integrate_with_breaks(|r| 2.0 * PI * (1.0 - t.value(r).powi(2)) * r, 0.0, b, &[1.0], tol).unwrap();
        let qk = integrate_with_breaks(|r| 2.0 * PI * t.value(r) * t.derivative(r) * r, 0.0, b, &[1.0], tol).unwrap();
        assert!((qi.value / ijk.i - 1.0).abs() < 1e-10);
        assert!((qk.value / ijk.k - 1.0).abs() < 1e-10);
    }

    #[test]
    fn collapse_limits() {
        // f tends to the indicator of r > a: I -> πa², and K = π∫(f²)' r dr -> πa
        let t = TrialFunction::new(&disc(), 1.0 + 1e-4).unwrap();
        let ijk = compute_ijk(&t);
        assert!((ijk.i - PI).abs() < 1e-3);
        assert!((ijk.k - PI).abs() < 1e-3);
    }

    #[test]
    fn asymptotic_examples() {
        let p = GasParameters::new(1.0, (-1.0f64).exp()).unwrap();
        assert!((asymptotic_upper(&p, 1.0).unwrap() - 4.0 * PI * p.rho).abs() < 1e-15);
        let p = GasParameters::new(1.0, 1e-10).unwrap();
        let want = 4.0 * PI * 1e-10 / (10.0 * 10f64.ln());
        assert!((asymptotic_upper(&p, 1.0).unwrap() / want - 1.0).abs() < 1e-14);
        assert!(asymptotic_upper(&GasParameters::new(1.0, 2.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn near_inadmissible_flag() {
        let s = disc();
        let p = GasParameters::new(1.0, 1e-4).unwrap();
        // find b with rho I close to 0.99 by bisection on ln b
        let (mut lo, mut hi) = (1.0f64.ln() + 1e-6, 1e4f64.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let t = TrialFunction::new(&s, mid.exp()).unwrap();
            if p.rho * compute_ijk(&t).i < 0.99 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = bound_at_b(&p, &s, lo.exp()).unwrap();
        assert!(r.near_inadmissible && r.energy_per_particle.is_finite());
        assert!(r.energy_per_particle > 10.0 * r.leading_term);
        assert!(matches!(bound_at_b(&p, &s, hi.exp() * 1.01), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn optimum_not_worse_than_reference_cutoff() {
        let s = disc();
        let p = GasParameters::new(1.0, 1e-30).unwrap();
        let opt = optimize_b(&p, &s).unwrap();
        let b0 = 1.0 / (2.0 * PI * p.rho).sqrt();
        let at_b0 = bound_at_b(&p, &s, b0).unwrap();
        assert!(opt.energy_per_particle <= at_b0.energy_per_particle);
        assert!((opt.b_scaled - 1.0).abs() < 0.4);
    }

    #[test]
    fn range_too_large_is_rejected() {
        let s = disc();
        let p = GasParameters::new(1.0, 0.2).unwrap();
        assert!(matches!(optimize_b(&p, &s), Err(Error::Precondition(_))));
    }
}
