//! Nonnegative radial pair potentials and exact radial moments over them.
//!
//! A potential is an optional hard core (a radius inside which the
//! potential is infinite), followed by contiguous pieces covering
//! `[hard_core_radius, range]`, and optionally a tail beyond `range`.
//! Constant, polynomial and power-law pieces are integrated in closed
//! form; custom callables go through adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{self, Tolerance};

/// Functional form of `v(r)` on one piece.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// Σ c_j r^j, ascending powers.
    Polynomial(Vec<f64>),
    /// coefficient · r^exponent
    PowerLaw { coefficient: f64, exponent: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            Profile::PowerLaw {
                coefficient,
                exponent,
            } => write!(f, "PowerLaw({coefficient} r^{exponent})"),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Profile {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &cj| acc * r + cj),
            Profile::PowerLaw {
                coefficient,
                exponent,
            } => {
                if *coefficient == 0.0 {
                    0.0
                } else {
                    coefficient * r.powf(*exponent)
                }
            }
            Profile::Custom(f) => f(r),
        }
    }

    /// Monomial decomposition `(coefficient, exponent)` for closed-form families.
    fn monomials(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Profile::Constant(c) => Some(vec![(*c, 0.0)]),
            Profile::Polynomial(c) => Some(
                c.iter()
                    .enumerate()
                    .filter(|(_, &cj)| cj != 0.0)
                    .map(|(j, &cj)| (cj, j as f64))
                    .collect(),
            ),
            Profile::PowerLaw {
                coefficient,
                exponent,
            } => Some(vec![(*coefficient, *exponent)]),
            Profile::Custom(_) => None,
        }
    }

    pub fn scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Constant(c) => Profile::Constant(c * factor),
            Profile::Polynomial(c) => Profile::Polynomial(c.iter().map(|x| x * factor).collect()),
            Profile::PowerLaw {
                coefficient,
                exponent,
            } => Profile::PowerLaw {
                coefficient: coefficient * factor,
                exponent: *exponent,
            },
            Profile::Custom(f) => {
                let f = Arc::clone(f);
                Profile::Custom(Arc::new(move |r| factor * f(r)))
            }
        }
    }

    /// `s² p(s r)`
    fn dilated(&self, s: f64) -> Profile {
        let s2 = s * s;
        match self {
            Profile::Constant(c) => Profile::Constant(c * s2),
            Profile::Polynomial(c) => Profile::Polynomial(
                c.iter()
                    .enumerate()
                    .map(|(j, cj)| cj * s2 * s.powi(j as i32))
                    .collect(),
            ),
            Profile::PowerLaw {
                coefficient,
                exponent,
            } => Profile::PowerLaw {
                coefficient: coefficient * s2 * s.powf(*exponent),
                exponent: *exponent,
            },
            Profile::Custom(f) => {
                let f = Arc::clone(f);
                Profile::Custom(Arc::new(move |r| s2 * f(s * r)))
            }
        }
    }

    fn is_identically_zero(&self) -> bool {
        match self.monomials() {
            Some(m) => m.iter().all(|(c, _)| *c == 0.0),
            None => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub r_lo: f64,
    pub r_hi: f64,
    pub profile: Profile,
}

impl Piece {
    pub fn new(r_lo: f64, r_hi: f64, profile: Profile) -> Self {
        Self {
            r_lo,
            r_hi,
            profile,
        }
    }
}

/// Radial weight multiplying `v(r) r` inside [`RadialPotential::radial_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    One,
    /// ln(r/a)
    Log { a: f64 },
    /// r^k
    Power(f64),
}

/// A broken potential invariant, as reported by [`RadialPotential::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveRange { range: f64 },
    NegativeHardCore { radius: f64 },
    CoreBeyondRange { core: f64, range: f64 },
    EmptyPiece { piece: usize, r_lo: f64, r_hi: f64 },
    Unsorted { piece: usize },
    Overlap { first: usize, second: usize, r_lo: f64, r_hi: f64 },
    Gap { from: f64, to: f64 },
    Negative { piece: usize, r_lo: f64, r_hi: f64, r: f64, value: f64 },
    NonFinite { piece: usize, r: f64 },
    NegativeTail { r: f64, value: f64 },
    PieceInsideCore { piece: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveRange { range } => write!(f, "range must be positive, got {range}"),
            Violation::NegativeHardCore { radius } => write!(f, "hard-core radius {radius} is negative"),
            Violation::CoreBeyondRange { core, range } => {
                write!(f, "hard-core radius {core} exceeds range {range}")
            }
            Violation::EmptyPiece { piece, r_lo, r_hi } => {
                write!(f, "piece {piece} is empty or reversed: [{r_lo}, {r_hi}]")
            }
            Violation::Unsorted { piece } => write!(f, "piece {piece} is not sorted by r_lo"),
            Violation::Overlap {
                first,
                second,
                r_lo,
                r_hi,
            } => write!(f, "overlap between pieces {first} and {second} on [{r_lo}, {r_hi}]"),
            Violation::Gap { from, to } => write!(f, "gap: no piece covers [{from}, {to}]"),
            Violation::Negative {
                piece,
                r_lo,
                r_hi,
                r,
                value,
            } => write!(
                f,
                "negativity at r∈[{r_lo}, {r_hi}] (piece {piece}): v({r}) = {value}"
            ),
            Violation::NonFinite { piece, r } => write!(f, "non-finite value in piece {piece} at r = {r}"),
            Violation::NegativeTail { r, value } => write!(f, "negativity in tail: v({r}) = {value}"),
            Violation::PieceInsideCore { piece } => write!(f, "piece {piece} starts inside the hard core"),
        }
    }
}

/// Nonnegative, spherically symmetric pair potential.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    hard_core_radius: f64,
    pieces: Vec<Piece>,
    range: f64,
    tail: Option<Profile>,
}

const SAMPLES_PER_PIECE: usize = 256;
const CONTIGUITY_TOL: f64 = 1e-12;

impl RadialPotential {
    /// Assembles a potential without checking invariants; see [`Self::validate`].
    pub fn from_parts(hard_core_radius: f64, pieces: Vec<Piece>, range: f64, tail: Option<Profile>) -> Self {
        Self {
            hard_core_radius,
            pieces,
            range,
            tail,
        }
    }

    /// Assembles and validates a potential.
    pub fn new(hard_core_radius: f64, pieces: Vec<Piece>, range: f64, tail: Option<Profile>) -> Result<Self> {
        let v = Self::from_parts(hard_core_radius, pieces, range, tail);
        let violations = v.validate();
        if violations.is_empty() {
            Ok(v)
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidPotential(msg.join("; ")))
        }
    }

    pub fn hard_disc(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), radius, None)
    }

    pub fn square_well(height: f64, range: f64) -> Result<Self> {
        Self::new(0.0, vec![Piece::new(0.0, range, Profile::Constant(height))], range, None)
    }

    /// Identically zero potential declared on `[0, range]`.
    pub fn zero(range: f64) -> Result<Self> {
        Self::square_well(0.0, range)
    }

    /// Pieces starting at `hard_core_radius`; the range is the last piece's upper edge.
    pub fn piecewise(hard_core_radius: f64, pieces: Vec<Piece>) -> Result<Self> {
        let range = pieces.last().map_or(hard_core_radius, |p| p.r_hi);
        Self::new(hard_core_radius, pieces, range, None)
    }

    /// Returns a copy carrying `tail` for r > range.
    pub fn with_tail(&self, tail: Profile) -> Result<Self> {
        Self::new(self.hard_core_radius, self.pieces.clone(), self.range, Some(tail))
    }

    pub fn hard_core_radius(&self) -> f64 {
        self.hard_core_radius
    }

    pub fn has_hard_core(&self) -> bool {
        self.hard_core_radius > 0.0
    }

    /// R₀: beyond this radius the potential vanishes (or follows the tail).
    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn tail(&self) -> Option<&Profile> {
        self.tail.as_ref()
    }

    pub fn value(&self, r: f64) -> f64 {
        if r < self.hard_core_radius {
            return f64::INFINITY;
        }
        if r > self.range {
            return self.tail.as_ref().map_or(0.0, |t| t.value(r));
        }
        let n = self.pieces.len();
        for (i, p) in self.pieces.iter().enumerate() {
            if r >= p.r_lo && (r < p.r_hi || (i + 1 == n && r <= p.r_hi)) {
                return p.profile.value(r);
            }
        }
        0.0
    }

    /// Piece (or `None` for the empty region) that governs the open interval `(lo, hi)`.
    pub(crate) fn piece_covering(&self, lo: f64, hi: f64) -> Option<&Piece> {
        let mid = 0.5 * (lo + hi);
        self.pieces.iter().find(|p| mid >= p.r_lo && mid <= p.r_hi)
    }

    /// Radii where the potential may be non-smooth, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.hard_core_radius];
        for p in &self.pieces {
            b.push(p.r_lo);
            b.push(p.r_hi);
        }
        b.push(self.range);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn is_identically_zero(&self) -> bool {
        !self.has_hard_core()
            && self.pieces.iter().all(|p| p.profile.is_identically_zero())
            && self.tail.as_ref().is_none_or(|t| t.is_identically_zero())
    }

    /// Checks every invariant and reports each violation found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.range > 0.0) || !self.range.is_finite() {
            out.push(Violation::NonPositiveRange { range: self.range });
        }
        if self.hard_core_radius < 0.0 || !self.hard_core_radius.is_finite() {
            out.push(Violation::NegativeHardCore {
                radius: self.hard_core_radius,
            });
        }
        if self.hard_core_radius > self.range {
            out.push(Violation::CoreBeyondRange {
                core: self.hard_core_radius,
                range: self.range,
            });
        }
        let tol = CONTIGUITY_TOL * self.range.abs().max(1.0);
        for (i, p) in self.pieces.iter().enumerate() {
            if !(p.r_hi > p.r_lo) {
                out.push(Violation::EmptyPiece {
                    piece: i,
                    r_lo: p.r_lo,
                    r_hi: p.r_hi,
                });
            }
        }
        for i in 1..self.pieces.len() {
            let (prev, cur) = (&self.pieces[i - 1], &self.pieces[i]);
            if cur.r_lo < prev.r_lo {
                out.push(Violation::Unsorted { piece: i });
            } else if cur.r_lo < prev.r_hi - tol {
                out.push(Violation::Overlap {
                    first: i - 1,
                    second: i,
                    r_lo: cur.r_lo,
                    r_hi: prev.r_hi.min(cur.r_hi),
                });
            } else if cur.r_lo > prev.r_hi + tol {
                out.push(Violation::Gap {
                    from: prev.r_hi,
                    to: cur.r_lo,
                });
            }
        }
        match (self.pieces.first(), self.pieces.last()) {
            (Some(first), Some(last)) => {
                if first.r_lo > self.hard_core_radius + tol {
                    out.push(Violation::Gap {
                        from: self.hard_core_radius,
                        to: first.r_lo,
                    });
                }
                if first.r_lo < self.hard_core_radius - tol {
                    out.push(Violation::PieceInsideCore { piece: 0 });
                }
                if (last.r_hi - self.range).abs() > tol {
                    out.push(Violation::Gap {
                        from: last.r_hi.min(self.range),
                        to: last.r_hi.max(self.range),
                    });
                }
            }
            _ => {
                if self.hard_core_radius < self.range - tol {
                    out.push(Violation::Gap {
                        from: self.hard_core_radius,
                        to: self.range,
                    });
                }
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !(p.r_hi > p.r_lo) {
                continue;
            }
            if let Some(v) = scan_negative(&p.profile, p.r_lo, p.r_hi) {
                match v {
                    Scan::Negative(r, value) => out.push(Violation::Negative {
                        piece: i,
                        r_lo: p.r_lo,
                        r_hi: p.r_hi,
                        r,
                        value,
                    }),
                    Scan::NonFinite(r) => out.push(Violation::NonFinite { piece: i, r }),
                }
            }
        }
        if let Some(tail) = &self.tail {
            if let Some(Scan::Negative(r, value)) = scan_negative(tail, self.range, 1e3 * self.range.max(1.0)) {
                out.push(Violation::NegativeTail { r, value });
            }
        }
        out
    }

    /// ∫_{lo}^{hi} v(r) w(r) r dr with the default absolute tolerance 1e-12.
    pub fn radial_moment(&self, weight: Weight, lo: f64, hi: f64) -> Result<f64> {
        self.radial_moment_with(weight, lo, hi, Tolerance::default())
    }

    pub fn radial_moment_with(&self, weight: Weight, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
        if !(lo >= 0.0) || !(hi > lo) {
            return Err(Error::Precondition(format!(
                "radial moment needs 0 <= r_lo < r_hi, got [{lo}, {hi}]"
            )));
        }
        if let Weight::Log { a } = weight {
            if !(a > 0.0) {
                return Err(Error::Precondition(format!("log weight needs a > 0, got {a}")));
            }
        }
        if self.has_hard_core() && lo < self.hard_core_radius {
            return Err(Error::HardCoreInRange {
                lo,
                hi,
                core: self.hard_core_radius,
            });
        }
        let mut total = 0.0;
        for p in &self.pieces {
            let a = lo.max(p.r_lo);
            let b = hi.min(p.r_hi);
            if b > a {
                total += profile_moment(&p.profile, weight, a, b, tol)?;
            }
        }
        if hi > self.range {
            if let Some(tail) = &self.tail {
                total += profile_moment(tail, weight, lo.max(self.range), hi, tol)?;
            }
        }
        Ok(total)
    }

    /// λ·v
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 {
            return Self::zero(self.range);
        }
        Self::new(
            self.hard_core_radius,
            self.pieces
                .iter()
                .map(|p| Piece::new(p.r_lo, p.r_hi, p.profile.scaled(factor)))
                .collect(),
            self.range,
            self.tail.as_ref().map(|t| t.scaled(factor)),
        )
    }

    /// `s² v(s r)`: the same potential with all lengths divided by `s`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Precondition(format!("dilation factor must be positive, got {s}")));
        }
        Self::new(
            self.hard_core_radius / s,
            self.pieces
                .iter()
                .map(|p| Piece::new(p.r_lo / s, p.r_hi / s, p.profile.dilated(s)))
                .collect(),
            self.range / s,
            self.tail.as_ref().map(|t| t.dilated(s)),
        )
    }

    /// Cuts the tail off at `cutoff`, turning it into an ordinary piece.
    pub fn truncated(&self, cutoff: f64) -> Result<Self> {
        let Some(tail) = &self.tail else {
            return Ok(self.clone());
        };
        if !(cutoff > self.range) {
            return Ok(Self::from_parts(
                self.hard_core_radius,
                self.pieces.clone(),
                self.range,
                None,
            ));
        }
        let mut pieces = self.pieces.clone();
        if pieces.is_empty() && self.hard_core_radius < self.range {
            pieces.push(Piece::new(self.hard_core_radius, self.range, Profile::Constant(0.0)));
        }
        pieces.push(Piece::new(self.range, cutoff, tail.clone()));
        Self::new(self.hard_core_radius, pieces, cutoff, None)
    }

    /// True when `self(r) >= other(r)` at every probed radius.
    pub fn dominates(&self, other: &RadialPotential) -> bool {
        if other.hard_core_radius > self.hard_core_radius {
            return false;
        }
        let mut edges: Vec<f64> = self.breakpoints();
        edges.extend(other.breakpoints());
        let hi = self.range.max(other.range);
        let n = 4 * SAMPLES_PER_PIECE;
        edges.extend((0..=n).map(|i| hi * i as f64 / n as f64));
        edges.push(2.0 * hi);
        edges.push(10.0 * hi);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        // probe strictly between edges so single-point boundary values do not count
        let mut radii: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        radii.extend(edges.iter().flat_map(|&r| [r * (1.0 - 1e-9), r * (1.0 + 1e-9)]));
        radii.into_iter().all(|r| {
            let (a, b) = (self.value(r), other.value(r));
            a >= b || (a.is_infinite() && b.is_infinite())
        })
    }
}

enum Scan {
    Negative(f64, f64),
    NonFinite(f64),
}

fn scan_negative(p: &Profile, lo: f64, hi: f64) -> Option<Scan> {
    match p {
        Profile::Constant(c) => {
            if !c.is_finite() {
                Some(Scan::NonFinite(lo))
            } else if *c < 0.0 {
                Some(Scan::Negative(lo, *c))
            } else {
                None
            }
        }
        Profile::PowerLaw { coefficient, .. } if *coefficient < 0.0 => {
            Some(Scan::Negative(lo, p.value(lo.max(f64::MIN_POSITIVE))))
        }
        _ => {
            for i in 0..=SAMPLES_PER_PIECE {
                let r = lo + (hi - lo) * i as f64 / SAMPLES_PER_PIECE as f64;
                let val = p.value(r);
                if r == 0.0 && matches!(p, Profile::PowerLaw { .. }) {
                    continue;
                }
                if !val.is_finite() {
                    return Some(Scan::NonFinite(r));
                }
                if val < 0.0 {
                    return Some(Scan::Negative(r, val));
                }
            }
            None
        }
    }
}

/// Exact ∫ r^m dr and ∫ r^m ln(r/a) dr antiderivatives evaluated between bounds.
fn monomial_moment(coef: f64, m: f64, weight: Weight, lo: f64, hi: f64) -> Result<f64> {
    let p = m + 1.0;
    let anti = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return if p > 0.0 {
                Ok(0.0)
            } else {
                Err(Error::Divergent(format!("r^{m} is not integrable at the origin")))
            };
        }
        if r.is_infinite() {
            return if p < 0.0 {
                Ok(0.0)
            } else {
                Err(Error::Divergent(format!("r^{m} is not integrable at infinity")))
            };
        }
        Ok(match weight {
            Weight::Log { a } => {
                let l = (r / a).ln();
                if p == 0.0 {
                    0.5 * l * l
                } else {
                    r.powf(p) / p * (l - 1.0 / p)
                }
            }
            _ => {
                if p == 0.0 {
                    r.ln()
                } else {
                    r.powf(p) / p
                }
            }
        })
    };
    Ok(coef * (anti(hi)? - anti(lo)?))
}

fn profile_moment(p: &Profile, weight: Weight, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
    let shift = match weight {
        Weight::Power(k) => k,
        _ => 0.0,
    };
    if let Some(terms) = p.monomials() {
        let mut total = 0.0;
        for (c, e) in terms {
            if c != 0.0 {
                total += monomial_moment(c, e + 1.0 + shift, weight, lo, hi)?;
            }
        }
        return Ok(total);
    }
    let integrand = |r: f64| {
        let w = match weight {
            Weight::One => 1.0,
            Weight::Log { a } => (r / a).ln(),
            Weight::Power(k) => r.powf(k),
        };
        p.value(r) * w * r
    };
    let est = if hi.is_infinite() {
        quadrature::integrate_to_infinity(integrand, lo, tol)?
    } else {
        quadrature::integrate(integrand, lo, hi, tol)?
    };
    Ok(est.value)
}

/// Gas parameters: `mu = ħ²/2m` and the particle density `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    pub mu: f64,
    pub rho: f64,
}

impl GasParameters {
    pub fn new(mu: f64, rho: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() || !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!(
                "mu and rho must be positive and finite, got mu = {mu}, rho = {rho}"
            )));
        }
        Ok(Self { mu, rho })
    }

    /// `ln(ρa²)` from `ln a`.
    pub fn ln_rho_a2(&self, ln_a: f64) -> f64 {
        self.rho.ln() + 2.0 * ln_a
    }

    pub fn rho_a2(&self, a: f64) -> f64 {
        self.rho * a * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_moment_vanishes() {
        let v = RadialPotential::zero(1.0).unwrap();
        assert_eq!(v.radial_moment(Weight::One, 0.0, 1.0).unwrap(), 0.0);
        assert!(v.is_identically_zero());
    }

    #[test]
    fn square_well_closed_form() {
        let v = RadialPotential::square_well(3.0, 2.0).unwrap();
        let m = v.radial_moment(Weight::One, 0.0, 2.0).unwrap();
        assert!((m - 3.0 * 4.0 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_weighted_square_well_matches_reference() {
        // high-precision reference for ∫₀¹ 4 ln(2r) r dr
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let m = v.radial_moment(Weight::Log { a: 0.5 }, 0.0, 1.0).unwrap();
        assert!((m - 0.386_294_361_119_890_6).abs() < 1e-12);
    }

    #[test]
    fn hard_disc_is_valid() {
        let v = RadialPotential::from_parts(1.0, vec![], 1.0, None);
        assert!(v.validate().is_empty());
    }

    #[test]
    fn negative_piece_reported_once() {
        let v = RadialPotential::from_parts(0.0, vec![Piece::new(0.0, 1.0, Profile::Constant(-1.0))], 1.0, None);
        let viol = v.validate();
        assert_eq!(viol.len(), 1);
        assert!(viol[0].to_string().starts_with("negativity at r∈"));
    }

    #[test]
    fn overlapping_pieces_reported_once() {
        let v = RadialPotential::from_parts(
            0.0,
            vec![
                Piece::new(0.0, 1.0, Profile::Constant(1.0)),
                Piece::new(0.5, 2.0, Profile::Constant(1.0)),
            ],
            2.0,
            None,
        );
        let viol = v.validate();
        assert_eq!(viol.len(), 1, "{viol:?}");
        assert!(viol[0].to_string().starts_with("overlap"));
    }

    #[test]
    fn polynomial_dip_below_zero_is_caught() {
        // 1 - 4r + 4r² = (1-2r)² touches zero; shift it down slightly
        let v = RadialPotential::from_parts(
            0.0,
            vec![Piece::new(0.0, 1.0, Profile::Polynomial(vec![0.99, -4.0, 4.0]))],
            1.0,
            None,
        );
        assert!(matches!(v.validate()[0], Violation::Negative { .. }));
    }

    #[test]
    fn gap_and_range_mismatch() {
        let v = RadialPotential::from_parts(
            0.0,
            vec![
                Piece::new(0.0, 1.0, Profile::Constant(1.0)),
                Piece::new(1.5, 2.0, Profile::Constant(1.0)),
            ],
            2.0,
            None,
        );
        assert!(matches!(v.validate()[0], Violation::Gap { .. }));
    }

    #[test]
    fn hard_core_inside_window_is_an_error() {
        let v = RadialPotential::piecewise(0.5, vec![Piece::new(0.5, 1.0, Profile::Constant(2.0))]).unwrap();
        assert!(matches!(
            v.radial_moment(Weight::One, 0.0, 1.0),
            Err(Error::HardCoreInRange { .. })
        ));
        let m = v.radial_moment(Weight::One, 0.5, 1.0).unwrap();
        assert!((m - 2.0 * (1.0 - 0.25) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn custom_profile_uses_quadrature() {
        let v = RadialPotential::piecewise(
            0.0,
            vec![Piece::new(0.0, 1.0, Profile::Custom(Arc::new(|r: f64| (-r).exp())))],
        )
        .unwrap();
        // ∫₀¹ e^{-r} r dr = 1 - 2/e
        let m = v.radial_moment(Weight::One, 0.0, 1.0).unwrap();
        assert!((m - (1.0 - 2.0 / std::f64::consts::E)).abs() < 1e-12);
    }

    #[test]
    fn power_tail_moment_to_infinity() {
        let v = RadialPotential::hard_disc(1.0)
            .unwrap()
            .with_tail(Profile::PowerLaw {
                coefficient: 2.0,
                exponent: -4.0,
            })
            .unwrap();
        // ∫₁^∞ 2 r^{-3} dr = 1
        let m = v.radial_moment(Weight::One, 1.0, f64::INFINITY).unwrap();
        assert!((m - 1.0).abs() < 1e-14);
        assert!(v.radial_moment(Weight::Power(2.0), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn dilation_rescales_lengths() {
        let v = RadialPotential::square_well(4.0, 1.0).unwrap();
        let d = v.dilated(2.0).unwrap();
        assert_eq!(d.range(), 0.5);
        assert_eq!(d.value(0.2), 16.0);
    }

    #[test]
    fn dominance() {
        let big = RadialPotential::square_well(4.0, 1.0).unwrap();
        let small = RadialPotential::square_well(2.0, 0.5).unwrap();
        assert!(big.dominates(&small));
        assert!(!small.dominates(&big));
        let disc = RadialPotential::hard_disc(1.0).unwrap();
        assert!(disc.dominates(&big));
    }
}
