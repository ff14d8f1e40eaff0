//! Lower bound on the energy per particle from a soft annular potential,
//! a Temple estimate in boxes of side `ℓ`, and assembly over boxes.
//!
//! Everything is evaluated in the dimensionless variables
//! `x = ρℓ²`, `y = ρR²`, `X = |ln(ρa²)|`, which keeps densities down to
//! `ρa² ~ 1e-300` and beyond representable; dimensional wrappers convert.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::optimize::nelder_mead;
use crate::numerics::quadrature::gk15;
use crate::potentials::{GasParameters, Piece, Profile, RadialPotential};

/// `ν(R) = ∫_{R0}^{R} ln(r/a) r dr`
/// `= ¼[R²(ln(R²/a²) - 1) - R0²(ln(R0²/a²) - 1)]`.
pub fn nu_of_r(r0: f64, r: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) || !(r0 > 0.0) {
        return Err(Error::Precondition(format!("need a > 0 and R0 > 0, got a = {a}, R0 = {r0}")));
    }
    if a > r0 {
        return Err(Error::Precondition(format!(
            "a = {a} exceeds R0 = {r0}; ln(r/a) changes sign inside the annulus"
        )));
    }
    if !(r >= r0) {
        return Err(Error::Precondition(format!("need R >= R0, got R = {r}, R0 = {r0}")));
    }
    let term = |s: f64| s * s * (2.0 * (s / a).ln() - 1.0);
    Ok(0.25 * (term(r) - term(r0)))
}

/// Annular potential `U = 1/ν` on `(R0, R)` and zero elsewhere, normalized
/// so that `∫ U(r) ln(r/a) r dr = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftPotential {
    pub r0: f64,
    pub r: f64,
    pub a: f64,
    pub nu: f64,
    /// `π(R² - R0²)`
    pub area: f64,
}

impl SoftPotential {
    pub fn new(r0: f64, r: f64, a: f64) -> Result<Self> {
        let nu = nu_of_r(r0, r, a)?;
        Ok(Self {
            r0,
            r,
            a,
            nu,
            area: PI * (r * r - r0 * r0),
        })
    }

    /// Thin shell on `[R(1-width), R]`. `ν` is integrated numerically since
    /// the closed form cancels badly for small widths.
    pub fn shell(r: f64, a: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width < 1.0) {
            return Err(Error::Precondition(format!("shell width must be in (0,1), got {width}")));
        }
        let r0 = r * (1.0 - width);
        if !(a > 0.0) || a > r0 {
            return Err(Error::Precondition(format!("need 0 < a <= inner radius, got a = {a}")));
        }
        let nu = gk15(&|s: f64| (s / a).ln() * s, r0, r).0;
        Ok(Self {
            r0,
            r,
            a,
            nu,
            area: PI * (r - r0) * (r + r0),
        })
    }

    /// Unchecked constructor for evaluating formulas at arbitrary values.
    pub fn from_parts(r0: f64, r: f64, a: f64, nu: f64, area: f64) -> Self {
        Self { r0, r, a, nu, area }
    }

    pub fn height(&self) -> f64 {
        if self.nu > 0.0 {
            1.0 / self.nu
        } else {
            0.0
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r > self.r0 && r < self.r {
            self.height()
        } else {
            0.0
        }
    }

    /// As a radial potential on `[0, R]`, suitable for radial moments.
    pub fn to_potential(&self) -> Result<RadialPotential> {
        let mut pieces = Vec::new();
        if self.r0 > 0.0 {
            pieces.push(Piece::new(0.0, self.r0, Profile::Constant(0.0)));
        }
        pieces.push(Piece::new(self.r0, self.r, Profile::Constant(self.height())));
        RadialPotential::piecewise(0.0, pieces)
    }
}

/// Bounds on the first and second moments of the soft interaction in the
/// free ground state of a box holding `n` particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WBounds {
    pub lower: f64,
    pub upper: f64,
    pub second_moment: f64,
}

pub fn w_expectation_bounds(n_cell: u64, soft: &SoftPotential, ell: f64) -> Result<WBounds> {
    let q = soft.area / (ell * ell);
    if !(q < 1.0) {
        return Err(Error::Constraint(format!("covered fraction Q = {q} is not below 1")));
    }
    let pairs = (n_cell * n_cell.saturating_sub(1)) as f64;
    if q == 0.0 || pairs == 0.0 {
        return Ok(WBounds {
            lower: 0.0,
            upper: 0.0,
            second_moment: 0.0,
        });
    }
    let upper = pairs * q / soft.nu;
    Ok(WBounds {
        lower: pairs / soft.nu * q / (1.0 + (n_cell as f64 - 1.0) * q),
        upper,
        second_moment: n_cell as f64 / soft.nu * upper,
    })
}

/// `K(n) = (1-ε)(1-2R/ℓ)²/(1+(n-1)Q) · (1 - n/(εν/ℓ² - n(n-1)Q))`,
/// evaluated without validity checks.
pub fn k_factor(epsilon: f64, r_over_ell: f64, nu_over_ell2: f64, q: f64, n: f64) -> f64 {
    let geometric = (1.0 - epsilon) * (1.0 - 2.0 * r_over_ell).powi(2) / (1.0 + (n - 1.0) * q);
    geometric * (1.0 - n / (epsilon * nu_over_ell2 - n * (n - 1.0) * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundParams {
    pub epsilon: f64,
    pub ell: f64,
    pub r: f64,
    pub n_cell: u64,
    /// `A(R)/ℓ²`
    pub q: f64,
}

/// `max(2, ⌈4ρℓ²⌉)`
pub fn occupancy(x: f64) -> u64 {
    let p = (4.0 * x).ceil();
    if p.is_finite() && p > 2.0 {
        p as u64
    } else {
        2
    }
}

/// Temple estimate for one box: `K(n)` and the box energy
/// `μ n(n-1)/ℓ² (A/ν) K(n)`.
pub fn temple_cell_bound(params: &LowerBoundParams, soft: &SoftPotential, mu: f64) -> Result<(f64, f64)> {
    let ell2 = params.ell * params.ell;
    let n = params.n_cell as f64;
    let denom = params.epsilon * soft.nu / ell2 - n * (n - 1.0) * params.q;
    if !(denom > 0.0) {
        return Err(Error::Constraint(format!(
            "Temple condition fails: eps nu / ell^2 - n(n-1)Q = {denom} <= 0"
        )));
    }
    let k = k_factor(params.epsilon, params.r / params.ell, soft.nu / ell2, params.q, n);
    Ok((k, mu * n * (n - 1.0) / ell2 * soft.area / soft.nu * k))
}

/// Named validity conditions of a lower-bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstraintFlags {
    pub epsilon_in_unit_interval: bool,
    pub r_above_r0: bool,
    pub a_not_above_r0: bool,
    pub two_r_below_ell: bool,
    pub rho_ell2_above_one: bool,
    pub q_below_one: bool,
    pub temple_denominator_positive: bool,
    pub k_positive: bool,
}

impl ConstraintFlags {
    pub fn all(&self) -> bool {
        self.failed().is_empty()
    }

    pub fn failed(&self) -> Vec<&'static str> {
        [
            ("epsilon_in_unit_interval", self.epsilon_in_unit_interval),
            ("r_above_r0", self.r_above_r0),
            ("a_not_above_r0", self.a_not_above_r0),
            ("two_r_below_ell", self.two_r_below_ell),
            ("rho_ell2_above_one", self.rho_ell2_above_one),
            ("q_below_one", self.q_below_one),
            ("temple_denominator_positive", self.temple_denominator_positive),
            ("k_positive", self.k_positive),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

/// The five relative error terms controlling the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerErrorTerms {
    pub epsilon: f64,
    /// `1/(ρℓ²)`
    pub inverse_rho_ell2: f64,
    /// `R/ℓ`
    pub r_over_ell: f64,
    /// `ρR²`
    pub rho_r2: f64,
    /// `ρℓ⁴/(εR² ln(R²/a²))`
    pub temple: f64,
}

/// Size condition on `ℓ`: `ε ln(R²/a²)/(ρℓ²)` against `(ρℓ²)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TempleCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Bound evaluated in dimensionless variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedBound {
    /// `X = |ln(ρa²)|`
    pub log_gauge: f64,
    pub epsilon: f64,
    /// `ρℓ²`
    pub x: f64,
    /// `ρR²`
    pub y: f64,
    /// `ρR0²`
    pub y0: f64,
    pub n_cell: u64,
    pub q: f64,
    /// `ρν`
    pub rho_nu: f64,
    /// `A/ν`
    pub area_over_nu: f64,
    pub k_value: f64,
    /// bound divided by `μρ`
    pub energy_over_mu_rho: f64,
    /// bound divided by `4πμρ/X`
    pub ratio: f64,
    pub flags: ConstraintFlags,
    pub error_terms: LowerErrorTerms,
    pub temple_condition: TempleCondition,
}

/// Evaluates the assembled bound at `(ε, x, y)` for gauge `X` and
/// `ln(R0/a)`. Never fails; invalid inputs show up in the flags.
pub fn assemble_reduced(log_gauge: f64, ln_r0_over_a: f64, epsilon: f64, x: f64, y: f64) -> ReducedBound {
    let big_x = log_gauge;
    let ln_y0 = 2.0 * ln_r0_over_a - big_x;
    let y0 = ln_y0.exp();
    let log_r2_over_a2 = y.ln() + big_x;
    let rho_nu = 0.25 * (y * (log_r2_over_a2 - 1.0) - y0 * (2.0 * ln_r0_over_a - 1.0));
    let rho_area = PI * (y - y0);
    let q = rho_area / x;
    let n_cell = occupancy(x);
    let n = n_cell as f64;
    let nu_over_ell2 = rho_nu / x;
    let r_over_ell = (y / x).sqrt();
    let denom = epsilon * nu_over_ell2 - n * (n - 1.0) * q;
    let k_value = k_factor(epsilon, r_over_ell, nu_over_ell2, q, n);
    let area_over_nu = rho_area / rho_nu;
    let energy_over_mu_rho = area_over_nu * (1.0 - 1.0 / x) * k_value;
    let flags = ConstraintFlags {
        epsilon_in_unit_interval: epsilon > 0.0 && epsilon < 1.0,
        r_above_r0: y.ln() > ln_y0,
        a_not_above_r0: ln_r0_over_a >= 0.0,
        two_r_below_ell: 4.0 * y < x,
        rho_ell2_above_one: x > 1.0,
        q_below_one: q < 1.0,
        temple_denominator_positive: denom > 0.0,
        k_positive: k_value > 0.0,
    };
    let lhs = epsilon * log_r2_over_a2 / x;
    let rhs = x * x;
    ReducedBound {
        log_gauge: big_x,
        epsilon,
        x,
        y,
        y0,
        n_cell,
        q,
        rho_nu,
        area_over_nu,
        k_value,
        energy_over_mu_rho,
        ratio: energy_over_mu_rho * big_x / (4.0 * PI),
        flags,
        error_terms: LowerErrorTerms {
            epsilon,
            inverse_rho_ell2: 1.0 / x,
            r_over_ell,
            rho_r2: y,
            temple: x * x / (epsilon * y * log_r2_over_a2),
        },
        temple_condition: TempleCondition {
            lhs,
            rhs,
            holds: lhs > rhs,
        },
    }
}

impl ReducedBound {
    pub fn is_valid(&self) -> bool {
        self.flags.all() && self.ratio.is_finite()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    pub valid: bool,
    /// `None` when any constraint fails.
    pub energy_per_particle: Option<f64>,
    /// bound over `4πμρ/|ln(ρa²)|`; `None` when invalid.
    pub leading_ratio: Option<f64>,
    pub params: LowerBoundParams,
    pub ln_rho_a2: f64,
    pub nu: f64,
    pub area: f64,
    pub k_value: f64,
    pub flags: ConstraintFlags,
    pub failed: Vec<String>,
    pub error_terms: LowerErrorTerms,
    pub temple_condition: TempleCondition,
}

impl LowerBoundReport {
    fn from_reduced(gas: &GasParameters, red: &ReducedBound) -> Self {
        let rho = gas.rho;
        let valid = red.is_valid();
        let leading = 4.0 * PI * gas.mu * rho / red.log_gauge;
        LowerBoundReport {
            valid,
            energy_per_particle: valid.then_some(red.ratio * leading),
            leading_ratio: valid.then_some(red.ratio),
            params: LowerBoundParams {
                epsilon: red.epsilon,
                ell: (red.x / rho).sqrt(),
                r: (red.y / rho).sqrt(),
                n_cell: red.n_cell,
                q: red.q,
            },
            ln_rho_a2: -red.log_gauge,
            nu: red.rho_nu / rho,
            area: PI * (red.y - red.y0) / rho,
            k_value: red.k_value,
            flags: red.flags,
            failed: red.flags.failed().into_iter().map(String::from).collect(),
            error_terms: red.error_terms,
            temple_condition: red.temple_condition,
        }
    }
}

fn gauge(gas: &GasParameters, ln_a: f64) -> Result<f64> {
    let ln_rho_a2 = gas.ln_rho_a2(ln_a);
    if !(ln_rho_a2 < -1.0) || !ln_rho_a2.is_finite() {
        return Err(Error::Domain(format!(
            "need rho a^2 < e^-1, got ln(rho a^2) = {ln_rho_a2}"
        )));
    }
    Ok(-ln_rho_a2)
}

/// Dimensional bound `μρ (A/ν)(1 - 1/(ρℓ²)) K(max(2, ⌈4ρℓ²⌉))`.
pub fn assemble_lower_bound(
    gas: &GasParameters,
    ln_a: f64,
    r0: f64,
    epsilon: f64,
    ell: f64,
    r: f64,
) -> Result<LowerBoundReport> {
    let big_x = gauge(gas, ln_a)?;
    let red = assemble_reduced(big_x, r0.ln() - ln_a, epsilon, gas.rho * ell * ell, gas.rho * r * r);
    Ok(LowerBoundReport::from_reduced(gas, &red))
}

/// Proportionality constants of the parameter schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleConstants {
    pub epsilon: f64,
    pub ell: f64,
    pub r: f64,
}

impl Default for ScheduleConstants {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            ell: 1.0,
            r: 1.0,
        }
    }
}

/// `(ε, ρℓ², ρR²) = (c_ε X^{-1/5}, c_ℓ² X^{1/5}, c_R² X^{-1/5})`.
pub fn schedule_reduced(log_gauge: f64, c: &ScheduleConstants) -> (f64, f64, f64) {
    let s = log_gauge.powf(0.2);
    (c.epsilon / s, c.ell * c.ell * s, c.r * c.r / s)
}

/// Schedule with the size condition and its expected magnitudes.
#[derive(Debug, Clone, Serialize)]
pub struct Schedule {
    pub params: LowerBoundParams,
    pub temple_condition: TempleCondition,
    /// `X^{3/5}`, the expected size of the left side
    pub lhs_scale: f64,
    /// `X^{2/5}`, the expected size of the right side
    pub rhs_scale: f64,
}

/// The schedule at the given density. Fails when it violates `2R < ℓ` or
/// `R > R0`, naming the binding constraint.
pub fn schedule_parameters(gas: &GasParameters, ln_a: f64, r0: f64, c: &ScheduleConstants) -> Result<Schedule> {
    let big_x = gauge(gas, ln_a)?;
    let (eps, x, y) = schedule_reduced(big_x, c);
    let red = assemble_reduced(big_x, r0.ln() - ln_a, eps, x, y);
    if !red.flags.two_r_below_ell {
        return Err(Error::Constraint(format!(
            "schedule violates 2R < ell (2R/ell = {})",
            2.0 * (y / x).sqrt()
        )));
    }
    if !red.flags.r_above_r0 {
        return Err(Error::Constraint(format!(
            "schedule violates R > R0 (R/R0 = {})",
            ((y.ln() - red.y0.ln()) / 2.0).exp()
        )));
    }
    let rho = gas.rho;
    Ok(Schedule {
        params: LowerBoundParams {
            epsilon: eps,
            ell: (x / rho).sqrt(),
            r: (y / rho).sqrt(),
            n_cell: red.n_cell,
            q: red.q,
        },
        temple_condition: red.temple_condition,
        lhs_scale: big_x.powf(0.6),
        rhs_scale: big_x.powf(0.4),
    })
}

/// Report at the scheduled parameters, valid or not.
pub fn scheduled_report(gas: &GasParameters, ln_a: f64, r0: f64, c: &ScheduleConstants) -> Result<LowerBoundReport> {
    let big_x = gauge(gas, ln_a)?;
    let (eps, x, y) = schedule_reduced(big_x, c);
    let red = assemble_reduced(big_x, r0.ln() - ln_a, eps, x, y);
    Ok(LowerBoundReport::from_reduced(gas, &red))
}

/// Objective for minimization: `-ratio` when valid, otherwise a penalty
/// above 1 growing with the size of the violations.
#[allow(clippy::manual_clamp)] // max/min maps NaN to zero; clamp would keep it
fn penalized(red: &ReducedBound) -> f64 {
    if red.is_valid() {
        return -red.ratio;
    }
    let n = red.n_cell as f64;
    let denom = red.epsilon * red.rho_nu / red.x - n * (n - 1.0) * red.q;
    let mut v = 0.0;
    v += (4.0 * red.y / red.x - 1.0).max(0.0);
    v += (1.0 - red.x).max(0.0);
    v += (red.q - 1.0).max(0.0);
    v += (-denom / (n * (n - 1.0) * red.q).max(1e-300)).max(0.0).min(1e6);
    if red.flags.temple_denominator_positive && !red.flags.k_positive {
        v += (n / denom - 1.0).clamp(0.0, 1e6);
    }
    if !red.flags.r_above_r0 {
        v += (red.y0 / red.y - 1.0).clamp(0.0, 1e6);
    }
    if !v.is_finite() {
        v = 1e12;
    }
    1.0 + v
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Numerical maximization of the bound over `(ε, ℓ, R)`: a deterministic
/// grid scan followed by Nelder–Mead in `(logit ε, ln ρℓ², ln ρR²)` from the
/// best grid point and from the schedule. The scheduled point is always a
/// candidate, so the result is never below a valid scheduled bound.
pub fn optimize_lower_bound(
    gas: &GasParameters,
    ln_a: f64,
    r0: f64,
    c: &ScheduleConstants,
) -> Result<LowerBoundReport> {
    let big_x = gauge(gas, ln_a)?;
    let red = optimize_reduced(big_x, r0.ln() - ln_a, c)?;
    Ok(LowerBoundReport::from_reduced(gas, &red))
}

const GRID_EPS: usize = 40;
const GRID_X: usize = 48;
const GRID_Y: usize = 60;

/// Iterations of each simplex run.
pub const SIMPLEX_ITERATIONS: usize = 200;

pub fn optimize_reduced(log_gauge: f64, ln_r0_over_a: f64, c: &ScheduleConstants) -> Result<ReducedBound> {
    let eval = |p: &[f64; 3]| assemble_reduced(log_gauge, ln_r0_over_a, logistic(p[0]), p[1].exp(), p[2].exp());
    let objective = |p: &[f64; 3]| penalized(&eval(p));

    let (e0, x0, y0) = schedule_reduced(log_gauge, c);
    let seed = [logit(e0.clamp(1e-6, 1.0 - 1e-6)), x0.ln(), y0.ln()];

    // grid over logit ε, ln x in (0, ln X + 2], and ln y below ln(x/4),
    // denser near the 2R < ℓ edge where the feasible set first opens up
    let ln_y_floor = 2.0 * ln_r0_over_a - log_gauge;
    let x_top = log_gauge.ln().max(1.0) + 2.0;
    let (t_lo, t_hi) = (logit(0.01), logit(0.995));
    let mut best_grid = seed;
    let mut best_val = objective(&seed);
    for i in 0..GRID_EPS {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (GRID_EPS - 1) as f64;
        for j in 1..=GRID_X {
            let lx = x_top * j as f64 / GRID_X as f64;
            let y_hi = lx - 4f64.ln();
            for k in 1..=GRID_Y {
                let u = k as f64 / GRID_Y as f64;
                let ly = y_hi - 30.0 * u * u;
                if ly <= ln_y_floor {
                    break;
                }
                let p = [t, lx, ly];
                let v = objective(&p);
                if v < best_val {
                    best_val = v;
                    best_grid = p;
                }
            }
        }
    }
    let step = [0.5, 0.3, 0.5];
    let mut candidates = vec![seed, best_grid];
    for start in [best_grid, seed] {
        let r = nelder_mead(objective, start, step, SIMPLEX_ITERATIONS, 1e-14);
        candidates.push(r.x);
    }
    candidates
        .iter()
        .map(eval)
        .filter(|r| r.is_valid())
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no (eps, ell, R) satisfies every constraint at |ln(rho a^2)| = {log_gauge}"
            ))
        })
}
