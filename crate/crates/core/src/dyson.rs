//! Numerical checks of the two-dimensional Dyson-type inequality
//! `∫_B μ|∇φ|² + v|φ|²/2 ≥ μ∫_B U|φ|²` on star-shaped domains, for soft
//! potentials `U` supported outside `R0` with `∫U(r) ln(r/a) r dr ≤ 1`.
//!
//! The check is done ray by ray: only the radial derivative of `φ` is kept,
//! which can only lower the left side.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_with_breaks, Tolerance};
use crate::potentials::{RadialPotential, Weight};
use crate::profile::RadialProfile;

/// Slack below which an inequality counts as violated.
pub const SLACK_TOLERANCE: f64 = -1e-8;

/// Relative tolerance on the normalization `∫U ln(r/a) r dr ≤ 1`.
const MOMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    /// `∫_0^∞ U(r) ln(r/a) r dr`
    pub moment: f64,
    pub vanishes_below_r0: bool,
    pub normalized: bool,
    pub admissible: bool,
}

pub fn check_u_admissible(u: &RadialPotential, a: f64, r0: f64) -> Result<Admissibility> {
    if u.has_hard_core() {
        return Err(Error::Precondition("U must be finite; it has a hard core".into()));
    }
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("a must be positive, got {a}")));
    }
    let hi = u.range();
    // Quadrature rather than closed-form antiderivatives: thin shells cancel.
    let moment = integrate_with_breaks(|r| u.value(r) * (r / a).ln() * r, 0.0, hi, &u.breakpoints(), quad_tol())?.value;
    let inner = if r0 > 0.0 {
        u.radial_moment(Weight::One, 0.0, r0.min(hi))?
    } else {
        0.0
    };
    let vanishes_below_r0 = inner == 0.0;
    let normalized = moment <= 1.0 + MOMENT_TOLERANCE;
    Ok(Admissibility {
        moment,
        vanishes_below_r0,
        normalized,
        admissible: vanishes_below_r0 && normalized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseReport {
    /// `2π∫_0^{R_max} (μ f'² + v f²/2) r dr`
    pub lhs: f64,
    /// `2πμ/ln(R/a) · f(R)²`
    pub rhs: f64,
    pub slack: f64,
}

fn quad_tol() -> Tolerance {
    Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_intervals: 50_000,
    }
}

/// Radial energy `∫_{lo}^{hi} (μ f'² + v f²/2) r dr`. On a hard core the
/// profile must vanish; otherwise the energy is infinite and an error is
/// returned.
fn radial_energy<P: RadialProfile + ?Sized>(f: &P, v: &RadialPotential, mu: f64, hi: f64) -> Result<f64> {
    let core = v.hard_core_radius();
    if core > 0.0 {
        let probes = (1..=8).map(|i| core * i as f64 / 9.0);
        if probes.into_iter().any(|r| f.value(r) != 0.0) {
            return Err(Error::Precondition(
                "profile does not vanish on the hard core; the energy is infinite".into(),
            ));
        }
    }
    let lo = core.min(hi);
    if hi <= lo {
        return Ok(0.0);
    }
    let r0 = v.range();
    let mut breaks = v.breakpoints();
    breaks.extend(f.breakpoints());
    let g = |r: f64| {
        let d = f.derivative(r);
        let pot = if r > r0 { 0.0 } else { v.value(r) };
        let val = f.value(r);
        (mu * d * d + 0.5 * pot * val * val) * r
    };
    Ok(integrate_with_breaks(g, lo, hi, &breaks, quad_tol())?.value)
}

/// Checks `2π∫_0^{R_max}(μf'² + v f²/2) r dr ≥ 2πμ f(R)²/ln(R/a)`.
pub fn check_pointwise<P: RadialProfile + ?Sized>(
    f: &P,
    v: &RadialPotential,
    mu: f64,
    a: f64,
    big_r: f64,
    r_max: f64,
) -> Result<PointwiseReport> {
    if !(big_r > v.range()) || !(big_r <= r_max) {
        return Err(Error::Precondition(format!(
            "need R0 < R <= R_max, got R0 = {}, R = {big_r}, R_max = {r_max}",
            v.range()
        )));
    }
    if !(a > 0.0) || !(big_r > a) {
        return Err(Error::Precondition(format!("need 0 < a < R, got a = {a}")));
    }
    let lhs = 2.0 * PI * radial_energy(f, v, mu, r_max)?;
    let fr = f.value(big_r);
    let rhs = 2.0 * PI * mu / (big_r / a).ln() * fr * fr;
    Ok(PointwiseReport {
        lhs,
        rhs,
        slack: lhs - rhs,
    })
}

/// Star-shaped region `{(r, θ): r < R(θ)}`.
#[derive(Clone)]
pub struct StarDomain {
    boundary: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for StarDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StarDomain(..)")
    }
}

impl StarDomain {
    pub fn new(boundary: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            boundary: Arc::new(boundary),
        }
    }

    pub fn disc(radius: f64) -> Self {
        Self::new(move |_| radius)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        (self.boundary)(theta)
    }

    /// Verifies `R(θ) > 0` on an angular grid.
    pub fn validate(&self, n_angles: usize) -> Result<()> {
        for k in 0..n_angles {
            let t = 2.0 * PI * k as f64 / n_angles as f64;
            let r = self.radius(t);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Precondition(format!("R(theta) = {r} at theta = {t}")));
            }
        }
        Ok(())
    }
}

/// Function on the plane given in polar coordinates.
pub trait PolarProfile: Send + Sync {
    fn value(&self, r: f64, theta: f64) -> f64;
    fn radial_derivative(&self, r: f64, theta: f64) -> f64;
    fn angular_derivative(&self, r: f64, theta: f64) -> f64;
    fn breakpoints(&self, _theta: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Rotationally symmetric `φ(r, θ) = f(r)`.
pub struct Radial<P>(pub P);

impl<P: RadialProfile> PolarProfile for Radial<P> {
    fn value(&self, r: f64, _theta: f64) -> f64 {
        self.0.value(r)
    }
    fn radial_derivative(&self, r: f64, _theta: f64) -> f64 {
        self.0.derivative(r)
    }
    fn angular_derivative(&self, _r: f64, _theta: f64) -> f64 {
        0.0
    }
    fn breakpoints(&self, _theta: f64) -> Vec<f64> {
        self.0.breakpoints()
    }
}

/// `φ(r, θ) = f(r)(1 + c cos θ)`.
pub struct Modulated<P> {
    pub profile: P,
    pub amplitude: f64,
}

impl<P: RadialProfile> PolarProfile for Modulated<P> {
    fn value(&self, r: f64, theta: f64) -> f64 {
        self.profile.value(r) * (1.0 + self.amplitude * theta.cos())
    }
    fn radial_derivative(&self, r: f64, theta: f64) -> f64 {
        self.profile.derivative(r) * (1.0 + self.amplitude * theta.cos())
    }
    fn angular_derivative(&self, r: f64, theta: f64) -> f64 {
        -self.profile.value(r) * self.amplitude * theta.sin()
    }
    fn breakpoints(&self, _theta: f64) -> Vec<f64> {
        self.profile.breakpoints()
    }
}

/// One ray of a profile, viewed as a radial function.
struct Ray<'a, P: ?Sized> {
    phi: &'a P,
    theta: f64,
}

impl<P: PolarProfile + ?Sized> RadialProfile for Ray<'_, P> {
    fn value(&self, r: f64) -> f64 {
        self.phi.value(r, self.theta)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.phi.radial_derivative(r, self.theta)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.phi.breakpoints(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCheck {
    pub theta: f64,
    pub boundary: f64,
    /// `∫_0^{R(θ)} (μ(∂_rφ)² + vφ²/2) r dr`
    pub lhs: f64,
    /// `μ∫_0^{R(θ)} U φ² r dr`
    pub rhs: f64,
    pub slack: f64,
    /// `R(θ) ≤ R0`: the right side vanishes.
    pub trivial: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DysonReport {
    pub n_angles: usize,
    pub min_slack: f64,
    /// angular quadrature of the per-ray slacks
    pub total_slack: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub trivial_angles: usize,
    pub holds: bool,
    pub angles: Vec<AngleCheck>,
}

/// Per-ray check and angular assembly of the inequality on `domain`.
/// `U` must be admissible for `a` and `v`'s range.
pub fn check_dyson_inequality<P: PolarProfile + ?Sized>(
    phi: &P,
    domain: &StarDomain,
    v: &RadialPotential,
    u: &RadialPotential,
    mu: f64,
    a: f64,
    n_angles: usize,
) -> Result<DysonReport> {
    if n_angles == 0 {
        return Err(Error::Precondition("need at least one angle".into()));
    }
    domain.validate(n_angles)?;
    let adm = check_u_admissible(u, a, v.range())?;
    if !adm.admissible {
        return Err(Error::Precondition(format!(
            "U is not admissible (moment {}, vanishes below R0: {})",
            adm.moment, adm.vanishes_below_r0
        )));
    }
    let r0 = v.range();
    let u_range = u.range();
    let angles: Vec<Result<AngleCheck>> = (0..n_angles)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_angles as f64;
            let boundary = domain.radius(theta);
            let ray = Ray { phi, theta };
            let lhs = radial_energy(&ray, v, mu, boundary)?;
            let trivial = boundary <= r0;
            let rhs = if trivial {
                0.0
            } else {
                let hi = boundary.min(u_range);
                let mut breaks = u.breakpoints();
                breaks.extend(ray.breakpoints());
                let g = |r: f64| {
                    let val = ray.value(r);
                    u.value(r) * val * val * r
                };
                if hi > r0 {
                    mu * integrate_with_breaks(g, r0, hi, &breaks, quad_tol())?.value
                } else {
                    0.0
                }
            };
            Ok(AngleCheck {
                theta,
                boundary,
                lhs,
                rhs,
                slack: lhs - rhs,
                trivial,
            })
        })
        .collect();
    let angles: Vec<AngleCheck> = angles.into_iter().collect::<Result<_>>()?;
    let dtheta = 2.0 * PI / n_angles as f64;
    let lhs: f64 = angles.iter().map(|c| c.lhs).sum::<f64>() * dtheta;
    let rhs: f64 = angles.iter().map(|c| c.rhs).sum::<f64>() * dtheta;
    let min_slack = angles.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let total_slack = angles.iter().map(|c| c.slack).sum::<f64>() * dtheta;
    Ok(DysonReport {
        n_angles,
        min_slack,
        total_slack,
        lhs,
        rhs,
        trivial_angles: angles.iter().filter(|c| c.trivial).count(),
        holds: min_slack >= SLACK_TOLERANCE && total_slack >= SLACK_TOLERANCE,
        angles,
    })
}

/// `∫_B μ|∇φ|² + v|φ|²/2` with the full gradient, using the same angular
/// grid as [`check_dyson_inequality`]. Integration starts at `r_min`.
pub fn full_gradient_energy<P: PolarProfile + ?Sized>(
    phi: &P,
    domain: &StarDomain,
    v: &RadialPotential,
    mu: f64,
    n_angles: usize,
    r_min: f64,
) -> Result<(f64, f64)> {
    let r0 = v.range();
    let per_angle: Vec<Result<(f64, f64)>> = (0..n_angles)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_angles as f64;
            let hi = domain.radius(theta);
            let lo = r_min.max(v.hard_core_radius());
            if hi <= lo {
                return Ok((0.0, 0.0));
            }
            let mut breaks = v.breakpoints();
            breaks.extend(phi.breakpoints(theta));
            let pot = |r: f64| if r > r0 { 0.0 } else { v.value(r) };
            let full = |r: f64| {
                let dr = phi.radial_derivative(r, theta);
                let dt = phi.angular_derivative(r, theta) / r;
                let val = phi.value(r, theta);
                (mu * (dr * dr + dt * dt) + 0.5 * pot(r) * val * val) * r
            };
            let radial = |r: f64| {
                let dr = phi.radial_derivative(r, theta);
                let val = phi.value(r, theta);
                (mu * dr * dr + 0.5 * pot(r) * val * val) * r
            };
            Ok((
                integrate_with_breaks(full, lo, hi, &breaks, quad_tol())?.value,
                integrate_with_breaks(radial, lo, hi, &breaks, quad_tol())?.value,
            ))
        })
        .collect();
    let dtheta = 2.0 * PI / n_angles as f64;
    let mut full = 0.0;
    let mut radial = 0.0;
    for r in per_angle {
        let (f, g) = r?;
        full += f * dtheta;
        radial += g * dtheta;
    }
    Ok((full, radial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::SoftPotential;
    use crate::profile::ConstantProfile;
    use crate::scattering::solve_radial;
    use crate::upper_bound::TrialFunction;

    #[test]
    fn soft_potential_is_admissible() {
        let u = SoftPotential::new(1.0, 3.0, 0.4).unwrap().to_potential().unwrap();
        let adm = check_u_admissible(&u, 0.4, 1.0).unwrap();
        assert!((adm.moment - 1.0).abs() < 1e-12 && adm.admissible);
        let doubled = u.scaled(2.0).unwrap();
        let adm = check_u_admissible(&doubled, 0.4, 1.0).unwrap();
        assert!((adm.moment - 2.0).abs() < 1e-12 && !adm.admissible);
        let zero = RadialPotential::zero(2.0).unwrap();
        let adm = check_u_admissible(&zero, 0.4, 1.0).unwrap();
        assert!(adm.moment == 0.0 && adm.admissible);
    }

    #[test]
    fn minimizer_is_the_equality_case() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let s = solve_radial(&v, 1.0, 2).unwrap().renormalized(3.0).unwrap();
        let rep = check_pointwise(&s, &v, 1.0, s.a(), 3.0, 3.0).unwrap();
        assert!(rep.slack.abs() < 1e-6, "{rep:?}");
    }

    #[test]
    fn constant_profile_is_the_integral_inequality() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let s = solve_radial(&v, 1.0, 2).unwrap();
        let rep = check_pointwise(&ConstantProfile(1.0), &v, 1.0, s.a(), 1.0 + 1e-12, 1.0 + 1e-12).unwrap();
        assert!((rep.lhs - 2.0 * PI).abs() < 1e-9);
        assert!(rep.slack > 0.0);
        let disc = RadialPotential::hard_disc(1.0).unwrap();
        assert!(check_pointwise(&ConstantProfile(1.0), &disc, 1.0, 1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn small_disc_is_trivial() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let u = SoftPotential::new(1.0, 2.0, 0.3).unwrap().to_potential().unwrap();
        let rep = check_dyson_inequality(
            &Radial(ConstantProfile(1.0)),
            &StarDomain::disc(0.8),
            &v,
            &u,
            1.0,
            0.3,
            16,
        )
        .unwrap();
        assert_eq!(rep.trivial_angles, 16);
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.holds);
    }

    #[test]
    fn trial_function_on_disc() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let s = solve_radial(&v, 1.0, 2).unwrap();
        let trial = TrialFunction::new(&s, 6.0).unwrap();
        let u = SoftPotential::new(1.0, 4.0, s.a()).unwrap().to_potential().unwrap();
        let rep = check_dyson_inequality(&Radial(trial), &StarDomain::disc(5.0), &v, &u, 1.0, s.a(), 64).unwrap();
        assert!(rep.holds && rep.min_slack >= 0.0, "{}", rep.min_slack);
    }

    #[test]
    fn radial_reduction_is_conservative() {
        let v = RadialPotential::hard_disc(0.5).unwrap();
        let s = solve_radial(&v, 1.0, 2).unwrap();
        let phi = Modulated {
            profile: s,
            amplitude: 0.5,
        };
        let domain = StarDomain::new(|t| 2.0 + 0.5 * (3.0 * t).sin());
        let (full, radial) = full_gradient_energy(&phi, &domain, &v, 1.0, 32, 0.0).unwrap();
        assert!(full > radial);
    }
}
