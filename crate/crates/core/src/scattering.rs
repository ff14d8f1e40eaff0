//! Zero-energy scattering: the radial solution of
//! `-μ(f'' + (n-1) f'/r) + v f / 2 = 0`, the scattering length `a`
//! extracted from the harmonic exterior, and an independent finite-element
//! minimization of the energy functional on a ball.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::quadrature::{gk15, GAUSS3};
use crate::numerics::special::{gamma_half, unit_sphere_area};
use crate::potentials::{Profile, RadialPotential, Weight};
use crate::profile::{quintic, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Start radius for potentials without a hard core, as a fraction of the
    /// first breakpoint.
    pub start_fraction: f64,
    /// Approximate number of stored samples of the solution.
    pub samples: usize,
    /// `|f'(R0)| R0 / f(R0)` below this declares `a = 0` in two dimensions.
    pub zero_threshold: f64,
    /// Normalization radius as a multiple of the range.
    pub reference_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            start_fraction: 1e-6,
            samples: 2048,
            zero_threshold: 1e-13,
            reference_factor: 2.0,
        }
    }
}

/// Integration variable used by the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Radial,
    /// t = ln r
    Logarithmic,
}

/// One stored point of the solution: `(r, f, f', f'')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Knot {
    pub r: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

#[derive(Debug, Clone)]
struct Segment {
    knots: Vec<Knot>,
}

impl Segment {
    fn lo(&self) -> f64 {
        self.knots[0].r
    }
    fn hi(&self) -> f64 {
        self.knots[self.knots.len() - 1].r
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        let k = &self.knots;
        let i = k.partition_point(|p| p.r <= r).clamp(1, k.len() - 1) - 1;
        let (p, q) = (k[i], k[i + 1]);
        quintic(r, p.r, q.r, [p.f, p.df, p.d2f], [q.f, q.df, q.d2f])
    }
}

/// Zero-energy radial solution with its scattering length.
///
/// Values are normalized so that `f0(reference_radius) = 1`. Inside the
/// range the solution is interpolated from ODE samples; beyond it the
/// harmonic continuation of the boundary data is used.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    dimension: u32,
    mu: f64,
    a: f64,
    ln_a: f64,
    range: f64,
    core: f64,
    reference_radius: f64,
    boundary: (f64, f64),
    segments: Vec<Segment>,
    potential: RadialPotential,
    coordinate: Coordinate,
    steps: usize,
    /// `[∫f² dr, ∫f² r dr, interior energy]` over `[0, R0]`
    cached: [f64; 3],
}

impl ScatteringSolution {
    pub fn dimension(&self) -> u32 {
        self.dimension
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// Scattering length. Underflows to 0 for extremely weak potentials in
    /// two dimensions; use [`Self::ln_a`] there.
    pub fn a(&self) -> f64 {
        self.a
    }
    /// `ln a` when `a > 0`, `-inf` otherwise.
    pub fn ln_a(&self) -> f64 {
        self.ln_a
    }
    pub fn range(&self) -> f64 {
        self.range
    }
    pub fn core_radius(&self) -> f64 {
        self.core
    }
    pub fn reference_radius(&self) -> f64 {
        self.reference_radius
    }
    /// `(f0(R0), f0'(R0))` in the current normalization.
    pub fn boundary(&self) -> (f64, f64) {
        self.boundary
    }
    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }
    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn knots(&self) -> impl Iterator<Item = &Knot> {
        self.segments.iter().flat_map(|s| s.knots.iter())
    }

    /// Harmonic continuation of the boundary data to `r > 0`.
    fn exterior(&self, r: f64) -> (f64, f64) {
        let (f, df) = self.boundary;
        let r0 = self.range;
        match self.dimension {
            1 => (f + df * (r - r0), df),
            2 => (f + r0 * df * (r / r0).ln(), r0 * df / r),
            _ => (f + df * r0 * (1.0 - r0 / r), df * r0 * r0 / (r * r)),
        }
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        if r < self.core {
            return (0.0, 0.0);
        }
        if r >= self.range {
            return self.exterior(r);
        }
        let Some(first) = self.segments.first() else {
            return self.exterior(r);
        };
        if r < first.lo() {
            // below the series start point
            let k = first.knots[0];
            return (k.f, k.df * r / k.r);
        }
        let idx = self.segments.partition_point(|s| s.hi() < r);
        match self.segments.get(idx) {
            Some(s) => s.eval(r),
            None => self.exterior(r),
        }
    }

    pub fn f0(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn df0(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// The exterior form `f0^asymp` for all `r > 0`, normalized at the
    /// reference radius.
    pub fn f_asymp(&self, r: f64) -> f64 {
        let big_r = self.reference_radius;
        match self.dimension {
            1 => (r - self.a) / (big_r - self.a),
            2 => {
                if self.ln_a == f64::NEG_INFINITY {
                    1.0
                } else {
                    (r.ln() - self.ln_a) / (big_r.ln() - self.ln_a)
                }
            }
            _ => (1.0 - self.a / r) / (1.0 - self.a / big_r),
        }
    }

    /// Same solution normalized so that `f0(radius) = 1`.
    pub fn renormalized(&self, radius: f64) -> Result<Self> {
        if !(radius > self.core) {
            return Err(Error::Precondition(format!(
                "normalization radius {radius} must exceed the core radius {}",
                self.core
            )));
        }
        let scale = self.f0(radius);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("f0 vanishes at r = {radius}")));
        }
        let mut out = self.clone();
        out.reference_radius = radius;
        out.boundary = (self.boundary.0 / scale, self.boundary.1 / scale);
        for seg in &mut out.segments {
            for k in &mut seg.knots {
                k.f /= scale;
                k.df /= scale;
                k.d2f /= scale;
            }
        }
        for c in &mut out.cached {
            *c /= scale * scale;
        }
        Ok(out)
    }

    /// `R0 f0'(R0)` in the current normalization (two dimensions: the
    /// coefficient of `ln r` in the exterior).
    pub fn exterior_slope(&self) -> f64 {
        self.range * self.boundary.1
    }

    /// Sum over stored sample intervals of a 15-point rule applied to
    /// `g(r, f, f')`, plus the short stretch below the first sample.
    fn integrate_inside(&self, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        if let Some(first) = self.segments.first() {
            let k0 = first.knots[0];
            if self.core == 0.0 && k0.r > 0.0 {
                let h = |r: f64| g(r, k0.f, k0.df * r / k0.r);
                total += gk15(&h, 0.0, k0.r).0;
            }
        }
        for seg in &self.segments {
            for w in seg.knots.windows(2) {
                let (p, q) = (w[0], w[1]);
                if q.r <= p.r {
                    continue;
                }
                let h = |r: f64| {
                    let (f, df) = quintic(r, p.r, q.r, [p.f, p.df, p.d2f], [q.f, q.df, q.d2f]);
                    g(r, f, df)
                };
                total += gk15(&h, p.r, q.r).0;
            }
        }
        total
    }

    /// `∫_0^{R0} f0² r^k dr`.
    pub fn moment(&self, k: i32) -> f64 {
        match k {
            0 => self.cached[0],
            1 => self.cached[1],
            _ => self.integrate_inside(|r, f, _| f * f * r.powi(k)),
        }
    }

    fn compute_cache(&mut self) {
        let m0 = self.integrate_inside(|_, f, _| f * f);
        let m1 = self.integrate_inside(|r, f, _| f * f * r);
        let n = self.dimension as i32;
        let mu = self.mu;
        let v = self.potential.clone();
        let e = self.integrate_inside(|r, f, df| (mu * df * df + 0.5 * v.value(r) * f * f) * r.powi(n - 1));
        self.cached = [m0, m1, e];
    }

    /// `∫_0^{R0} (μ f0'² + v f0²/2) r^{n-1} dr` by quadrature over the samples.
    pub fn interior_energy(&self) -> f64 {
        self.cached[2]
    }

    /// `μ f0(R0) f0'(R0) R0^{n-1}`, equal to [`Self::interior_energy`] by
    /// integration by parts.
    pub fn interior_energy_boundary_term(&self) -> f64 {
        let (f, df) = self.boundary;
        self.mu * f * df * self.range.powi(self.dimension as i32 - 1)
    }

    /// Value of the energy functional of the solution on the ball of
    /// radius `big_r`, i.e. the minimum energy given `f0(big_r)`.
    pub fn energy_on_ball(&self, big_r: f64) -> Result<f64> {
        let s = self.renormalized(big_r)?;
        let (f, df) = s.eval(big_r);
        Ok(unit_sphere_area(self.dimension) * self.mu * f * df * big_r.powi(self.dimension as i32 - 1))
    }
}

impl RadialProfile for ScatteringSolution {
    fn value(&self, r: f64) -> f64 {
        self.f0(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.df0(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.potential.breakpoints()
    }
}

fn check_dimension(n: u32) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "radial solver supports dimensions 1, 2, 3; got {n}"
        )))
    }
}

fn check_inputs(v: &RadialPotential, mu: f64, n: u32) -> Result<()> {
    check_dimension(n)?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Precondition(format!("mu must be positive, got {mu}")));
    }
    let violations = v.validate();
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(|x| x.to_string()).collect();
        return Err(Error::InvalidPotential(msg.join("; ")));
    }
    Ok(())
}

/// Profile governing the open interval `(lo, hi)`, zero where no piece applies.
fn segment_profile(v: &RadialPotential, lo: f64, hi: f64) -> Profile {
    v.piece_covering(lo, hi)
        .map(|p| p.profile.clone())
        .unwrap_or(Profile::Constant(0.0))
}

/// Scattering length from boundary data at `r0`. Returns `(a, ln a)`.
fn match_exterior(n: u32, r0: f64, f: f64, df: f64, zero_threshold: f64) -> Result<(f64, f64)> {
    let ln_of = |a: f64| if a > 0.0 { a.ln() } else { f64::NEG_INFINITY };
    match n {
        1 => {
            if df == 0.0 {
                return Err(Error::Divergent(
                    "f'(R0) = 0 in one dimension: the scattering length is -infinity".into(),
                ));
            }
            let a = r0 - f / df;
            Ok((a, ln_of(a)))
        }
        2 => {
            if f == 0.0 {
                return Ok((r0, r0.ln()));
            }
            let ratio = df * r0 / f;
            if ratio.abs() < zero_threshold {
                return Ok((0.0, f64::NEG_INFINITY));
            }
            let ln_a = r0.ln() - 1.0 / ratio;
            Ok((ln_a.exp(), ln_a))
        }
        _ => {
            let a = r0 * r0 * df / (f + r0 * df);
            Ok((a, ln_of(a)))
        }
    }
}

/// Shoots the regular zero-energy solution from the origin (or the hard
/// core) out to the range and matches it to the harmonic exterior.
/// Any tail beyond the range is ignored.
pub fn solve_radial(v: &RadialPotential, mu: f64, n: u32) -> Result<ScatteringSolution> {
    solve_radial_with(v, mu, n, &SolverOptions::default())
}

pub fn solve_radial_with(
    v: &RadialPotential,
    mu: f64,
    n: u32,
    opts: &SolverOptions,
) -> Result<ScatteringSolution> {
    check_inputs(v, mu, n)?;
    let r0 = v.range();
    let core = v.hard_core_radius();
    let nf = f64::from(n);

    let mut edges: Vec<f64> = v
        .breakpoints()
        .into_iter()
        .filter(|&b| b > core && b < r0)
        .collect();
    let start;
    let mut state;
    if core > 0.0 {
        start = core;
        state = [0.0, 1.0];
    } else {
        let first = edges.first().copied().unwrap_or(r0);
        start = opts.start_fraction * first;
        let c = v.value(start) / (2.0 * mu);
        state = [1.0 + c * start * start / (2.0 * nf), c * start / nf];
    }
    let coordinate = if n == 2 && r0 / start > 1e3 {
        Coordinate::Logarithmic
    } else {
        Coordinate::Radial
    };
    let mut bounds = vec![start];
    bounds.append(&mut edges);
    bounds.push(r0);
    bounds.dedup();

    let span_of = |lo: f64, hi: f64| match coordinate {
        Coordinate::Radial => hi - lo,
        Coordinate::Logarithmic => (hi / lo).ln(),
    };
    let total_span: f64 = bounds.windows(2).map(|w| span_of(w[0], w[1])).sum();
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };

    let mut segments: Vec<Segment> = Vec::new();
    let mut steps = 0usize;
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let profile = segment_profile(v, lo, hi);
        let span = span_of(lo, hi);
        let share = ((opts.samples as f64) * span / total_span).max(8.0);
        let seg_opts = OdeOptions {
            h_max: span / share,
            ..ode_opts
        };
        let second = |r: f64, f: f64, df: f64| -(nf - 1.0) * df / r + profile.value(r) * f / (2.0 * mu);
        let mut knots: Vec<Knot> = Vec::new();
        let mut bad: Option<f64> = None;
        let end = match coordinate {
            Coordinate::Radial => {
                let rhs = |r: f64, y: &[f64; 2]| [y[1], second(r, y[0], y[1])];
                let obs = |r: f64, y: &[f64; 2]| {
                    if !(y[0].is_finite() && y[1].is_finite()) {
                        bad.get_or_insert(r);
                    }
                    knots.push(Knot {
                        r,
                        f: y[0],
                        df: y[1],
                        d2f: second(r, y[0], y[1]),
                    });
                };
                ode::integrate(rhs, lo, state, hi, &seg_opts, obs)
            }
            Coordinate::Logarithmic => {
                let y0 = [state[0], lo * state[1]];
                let rhs = |t: f64, y: &[f64; 2]| {
                    let r = t.exp();
                    [y[1], r * r * profile.value(r) * y[0] / (2.0 * mu) - (nf - 2.0) * y[1]]
                };
                let obs = |t: f64, y: &[f64; 2]| {
                    let r = t.exp();
                    if !(y[0].is_finite() && y[1].is_finite()) {
                        bad.get_or_insert(r);
                    }
                    let df = y[1] / r;
                    knots.push(Knot {
                        r,
                        f: y[0],
                        df,
                        d2f: second(r, y[0], df),
                    });
                };
                ode::integrate(rhs, lo.ln(), y0, hi.ln(), &seg_opts, obs).map(|y| [y[0], y[1] / hi])
            }
        };
        let end = end.map_err(|e| match e {
            Error::Ode { radius, reason } => Error::Ode {
                radius: match coordinate {
                    Coordinate::Radial => radius,
                    Coordinate::Logarithmic => radius.exp(),
                },
                reason,
            },
            other => other,
        })?;
        if let Some(r) = bad {
            return Err(Error::Ode {
                radius: r,
                reason: "non-finite state".into(),
            });
        }
        // pin the endpoints exactly
        if let Some(k) = knots.first_mut() {
            k.r = lo;
        }
        if let Some(k) = knots.last_mut() {
            k.r = hi;
        }
        knots.dedup_by(|b, a| b.r <= a.r);
        steps += knots.len();
        segments.push(Segment { knots });
        state = end;

        let scale = state[0].abs().max(state[1].abs() * hi);
        if scale > 1e100 {
            state = [state[0] / scale, state[1] / scale];
            for seg in &mut segments {
                for k in &mut seg.knots {
                    k.f /= scale;
                    k.df /= scale;
                    k.d2f /= scale;
                }
            }
        }
    }

    let peak = segments
        .iter()
        .flat_map(|s| s.knots.iter())
        .fold(0.0_f64, |m, k| m.max(k.f.abs()));
    if let Some(k) = segments
        .iter()
        .flat_map(|s| s.knots.iter())
        .find(|k| k.f < -1e-12 * peak.max(1e-300))
    {
        return Err(Error::Ode {
            radius: k.r,
            reason: format!("solution became negative (f = {:e})", k.f),
        });
    }

    let (f_r0, df_r0) = (state[0], state[1]);
    let (a, ln_a) = match_exterior(n, r0, f_r0, df_r0, opts.zero_threshold)?;
    let mut sol = ScatteringSolution {
        dimension: n,
        mu,
        a,
        ln_a,
        range: r0,
        core,
        reference_radius: r0,
        boundary: (f_r0, df_r0),
        segments,
        potential: v.clone(),
        coordinate,
        steps,
        cached: [0.0; 3],
    };
    sol.compute_cache();
    sol = sol.renormalized(opts.reference_factor * r0)?;
    Ok(sol)
}

/// Minimum of the energy functional on the ball of radius `big_r`:
/// `2μ/(R-a)` for n = 1, `2πμ/ln(R/a)` for n = 2 (0 when a = 0), and
/// `2π^{n/2} μ a / [Γ(n/2)(1 - a R^{2-n})]` for n ≥ 3.
pub fn min_energy(a: f64, big_r: f64, mu: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    match n {
        1 => {
            if !(big_r > a) {
                return Err(Error::Domain(format!("need R > a, got R = {big_r}, a = {a}")));
            }
            Ok(2.0 * mu / (big_r - a))
        }
        2 => {
            if !(a >= 0.0) || !(big_r > a) {
                return Err(Error::Domain(format!("need R > a >= 0, got R = {big_r}, a = {a}")));
            }
            if a == 0.0 {
                return Ok(0.0);
            }
            Ok(2.0 * std::f64::consts::PI * mu / (big_r / a).ln())
        }
        _ => {
            let denom = 1.0 - a * big_r.powi(2 - n as i32);
            if !(a >= 0.0) || !(denom > 0.0) {
                return Err(Error::Domain(format!(
                    "need a >= 0 and 1 - a R^(2-n) > 0, got R = {big_r}, a = {a}"
                )));
            }
            let sphere = 2.0 * std::f64::consts::PI.powf(f64::from(n) / 2.0) / gamma_half(n);
            Ok(sphere * mu * a / denom)
        }
    }
}

/// Two-dimensional minimum energy from `ln a`, usable when `a` underflows.
pub fn min_energy_log(ln_a: f64, big_r: f64, mu: f64) -> Result<f64> {
    let l = big_r.ln() - ln_a;
    if !(mu > 0.0) || !(l > 0.0) {
        return Err(Error::Domain(format!("need R > a and mu > 0, got ln(R/a) = {l}")));
    }
    if ln_a == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(2.0 * std::f64::consts::PI * mu / l)
}

/// Result of the finite-element minimization.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalMinimum {
    pub energy: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Minimizes the discretized energy functional
/// `∫_{|x|<R} μ|∇φ|² + v|φ|²/2` over radial φ with φ(R) = 1 using
/// piecewise-linear elements, and returns the minimum and the minimizer.
pub fn minimize_functional(
    v: &RadialPotential,
    big_r: f64,
    mu: f64,
    n: u32,
    grid_size: usize,
) -> Result<FunctionalMinimum> {
    check_inputs(v, mu, n)?;
    if !(big_r > v.range()) {
        return Err(Error::Precondition(format!(
            "ball radius {big_r} must exceed the range {}",
            v.range()
        )));
    }
    if grid_size < 64 {
        return Err(Error::Precondition(format!("grid_size must be >= 64, got {grid_size}")));
    }
    let r0 = v.range();
    let core = v.hard_core_radius();
    let nodes = fem_grid(v, big_r, grid_size);
    let potential = |r: f64| if r > r0 { 0.0 } else { v.value(r) };
    let m = nodes.len();
    let weight = |lo: f64, hi: f64| -> f64 {
        match n {
            1 => hi - lo,
            2 => 0.5 * (hi * hi - lo * lo),
            _ => (hi.powi(3) - lo.powi(3)) / 3.0,
        }
    };
    // element matrices [[ll, lr], [lr, rr]]
    let elements: Vec<[f64; 3]> = nodes
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let h = hi - lo;
            let stiff = mu * weight(lo, hi) / (h * h);
            let (mut ll, mut lr, mut rr) = (0.0, 0.0, 0.0);
            for (x, wq) in GAUSS3 {
                let r = 0.5 * (lo + hi) + 0.5 * h * x;
                let c = 0.5 * wq * h * 0.5 * potential(r) * r.powi(n as i32 - 1);
                let (pl, pr) = ((hi - r) / h, (r - lo) / h);
                ll += c * pl * pl;
                lr += c * pl * pr;
                rr += c * pr * pr;
            }
            [stiff + ll, -stiff + lr, stiff + rr]
        })
        .collect();

    // unknowns: nodes 0..m-1, except node 0 when it sits on a hard core
    let first = usize::from(core > 0.0);
    let last = m - 1;
    let size = last - first;
    let mut diag = vec![0.0; size];
    let mut off = vec![0.0; size.saturating_sub(1)];
    let mut rhs = vec![0.0; size];
    for (e, el) in elements.iter().enumerate() {
        let (i, j) = (e, e + 1);
        if i >= first && i < last {
            diag[i - first] += el[0];
        }
        if j >= first && j < last {
            diag[j - first] += el[2];
        }
        if i >= first && j < last {
            off[i - first] = el[1];
        }
        if j == last && i >= first {
            rhs[i - first] -= el[1];
        }
    }
    let interior = thomas(&off, &diag, &rhs)?;
    let mut values = vec![0.0; m];
    values[first..last].copy_from_slice(&interior);
    values[last] = 1.0;
    let mut energy = 0.0;
    for (e, el) in elements.iter().enumerate() {
        let (p, q) = (values[e], values[e + 1]);
        energy += el[0] * p * p + 2.0 * el[1] * p * q + el[2] * q * q;
    }
    Ok(FunctionalMinimum {
        energy: unit_sphere_area(n) * energy,
        radii: nodes,
        values,
    })
}

/// Nodes from the core (or origin) to `big_r`, with every potential
/// breakpoint a node and twice the density inside the range.
fn fem_grid(v: &RadialPotential, big_r: f64, grid_size: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = v.breakpoints();
    edges.push(0.0);
    edges.push(big_r);
    edges.retain(|&b| b >= v.hard_core_radius() && b <= big_r);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let r0 = v.range();
    let weights: Vec<f64> = edges
        .windows(2)
        .map(|w| (w[1] - w[0]) * if w[1] <= r0 { 2.0 } else { 1.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut nodes = vec![edges[0]];
    for (w, weight) in edges.windows(2).zip(&weights) {
        let count = ((grid_size as f64 * weight / total).round() as usize).max(4);
        for k in 1..=count {
            nodes.push(w[0] + (w[1] - w[0]) * k as f64 / count as f64);
        }
        *nodes.last_mut().unwrap() = w[1];
    }
    nodes
}

/// Solves a symmetric tridiagonal system; fails on a non-positive pivot.
fn thomas(off: &[f64], diag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if !(pivot > 0.0) {
        return Err(Error::Singular { row: 0 });
    }
    c[0] = if n > 1 { off[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::Singular { row: i });
        }
        c[i] = if i + 1 < n { off[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// Worst-case margins for the three comparison properties of the minimizer.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub reference_radius: f64,
    /// min over the grid of `f0 - f0^asymp`
    pub lower_bound_margin: f64,
    pub lower_bound_holds: bool,
    /// min over the grid of `f0(r_{i+1}) - f0(r_i)`
    pub monotone_margin: f64,
    pub monotone_holds: bool,
    pub comparison: Option<ComparisonMargins>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonMargins {
    /// min over the grid of `f̃0 - f0`
    pub profile_margin: f64,
    /// `ln a - ln ã` (two dimensions) or `a - ã`
    pub length_margin: f64,
    pub holds: bool,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.lower_bound_holds && self.monotone_holds && self.comparison.as_ref().is_none_or(|c| c.holds)
    }
}

/// Tolerance used by [`check_lemma_properties`].
pub const LEMMA_TOLERANCE: f64 = 1e-10;

/// Checks `f0 >= f0^asymp`, that `f0` is nondecreasing, and, when a
/// pointwise smaller potential `v_tilde` is given, that `f0 <= f̃0` and `a >= ã`.
pub fn check_lemma_properties(
    v: &RadialPotential,
    v_tilde: Option<&RadialPotential>,
    mu: f64,
    n: u32,
    big_r: f64,
) -> Result<LemmaReport> {
    if let Some(w) = v_tilde {
        if !v.dominates(w) {
            return Err(Error::Precondition(
                "comparison requires v >= ṽ pointwise".into(),
            ));
        }
    }
    let sol = solve_radial(v, mu, n)?.renormalized(big_r)?;
    let grid = comparison_grid(&sol, v_tilde.map(|w| w.range()).unwrap_or(0.0), big_r);
    let tol = LEMMA_TOLERANCE;

    let lower = grid
        .iter()
        .filter(|&&r| r > sol.a().max(0.0))
        .map(|&r| sol.f0(r) - sol.f_asymp(r))
        .fold(f64::INFINITY, f64::min);
    let lower = if lower.is_finite() { lower } else { 0.0 };
    let mono = grid
        .windows(2)
        .map(|w| sol.f0(w[1]) - sol.f0(w[0]))
        .fold(f64::INFINITY, f64::min);

    let comparison = match v_tilde {
        None => None,
        Some(w) => {
            let other = solve_radial(w, mu, n)?.renormalized(big_r)?;
            let profile_margin = grid
                .iter()
                .map(|&r| other.f0(r) - sol.f0(r))
                .fold(f64::INFINITY, f64::min);
            let length_margin = if n == 2 {
                if sol.ln_a() == other.ln_a() {
                    0.0
                } else {
                    sol.ln_a() - other.ln_a()
                }
            } else {
                sol.a() - other.a()
            };
            let scale = sol.a().abs().max(1.0);
            Some(ComparisonMargins {
                profile_margin,
                length_margin,
                holds: profile_margin >= -tol && length_margin >= -tol * scale,
            })
        }
    };
    Ok(LemmaReport {
        reference_radius: big_r,
        lower_bound_margin: lower,
        lower_bound_holds: lower >= -tol,
        monotone_margin: mono,
        monotone_holds: mono >= -tol,
        comparison,
    })
}

fn comparison_grid(sol: &ScatteringSolution, other_range: f64, big_r: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = sol.knots().map(|k| k.r).collect();
    let hi = big_r.max(other_range);
    let m = 512;
    grid.extend((1..=m).map(|i| hi * i as f64 / m as f64));
    grid.retain(|&r| r > 0.0 && r <= big_r);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum InequalityStatus {
    Evaluated,
    Skipped { note: String },
}

/// Both sides of the dimension-appropriate lower bound on `∫v`.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub dimension: u32,
    pub integral_v: f64,
    pub bound: f64,
    pub slack: f64,
    pub a: f64,
    pub status: InequalityStatus,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        match self.status {
            InequalityStatus::Evaluated => self.slack >= 0.0,
            InequalityStatus::Skipped { .. } => true,
        }
    }
}

/// Compares `∫v` with `4μ/(R0-a)` (n = 1), `4πμ/ln(R0/a)` (n = 2) or
/// `8πμa` (n = 3). A hard core makes `∫v` infinite and is reported as an
/// error; `a = 0` in two dimensions is skipped.
pub fn integral_inequalities(v: &RadialPotential, mu: f64, n: u32) -> Result<InequalityReport> {
    check_inputs(v, mu, n)?;
    if v.has_hard_core() {
        return Err(Error::Divergent(
            "hard core: the integral of v is infinite and the inequality holds trivially".into(),
        ));
    }
    let sol = solve_radial(v, mu, n)?;
    integral_inequalities_for(v, &sol)
}

/// As [`integral_inequalities`] with a precomputed solution.
pub fn integral_inequalities_for(v: &RadialPotential, sol: &ScatteringSolution) -> Result<InequalityReport> {
    use std::f64::consts::PI;
    let n = sol.dimension();
    let mu = sol.mu();
    let r0 = v.range();
    if v.has_hard_core() {
        return Err(Error::Divergent(
            "hard core: the integral of v is infinite and the inequality holds trivially".into(),
        ));
    }
    let skipped = |note: &str| InequalityReport {
        dimension: n,
        integral_v: 0.0,
        bound: 0.0,
        slack: 0.0,
        a: sol.a(),
        status: InequalityStatus::Skipped { note: note.into() },
    };
    if v.is_identically_zero() {
        return Ok(skipped("v vanishes identically; a = 0 and the inequality is degenerate"));
    }
    let (integral_v, bound) = match n {
        1 => (
            2.0 * v.radial_moment(Weight::Power(-1.0), 0.0, r0)?,
            4.0 * mu / (r0 - sol.a()),
        ),
        2 => {
            if sol.ln_a() == f64::NEG_INFINITY {
                return Ok(skipped("a = 0; the inequality is degenerate"));
            }
            (
                2.0 * PI * v.radial_moment(Weight::One, 0.0, r0)?,
                4.0 * PI * mu / (r0.ln() - sol.ln_a()),
            )
        }
        _ => (
            4.0 * PI * v.radial_moment(Weight::Power(1.0), 0.0, r0)?,
            8.0 * PI * mu * sol.a(),
        ),
    };
    Ok(InequalityReport {
        dimension: n,
        integral_v,
        bound,
        slack: integral_v - bound,
        a: sol.a(),
        status: InequalityStatus::Evaluated,
    })
}

/// Scattering lengths of a potential with a tail truncated at increasing
/// cutoffs, and an extrapolated limit.
#[derive(Debug, Clone, Serialize)]
pub struct InfiniteRangeResult {
    pub cutoffs: Vec<f64>,
    pub a_values: Vec<f64>,
    pub limit: f64,
    pub converged: bool,
}

/// Relative slack allowed before a decrease in `a(R0)` is reported.
const MONOTONE_SLACK: f64 = 1e-9;

pub fn infinite_range_a(v: &RadialPotential, mu: f64, n: u32, cutoffs: &[f64]) -> Result<InfiniteRangeResult> {
    if cutoffs.is_empty() {
        return Err(Error::Precondition("at least one cutoff is required".into()));
    }
    if cutoffs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("cutoffs must increase".into()));
    }
    let mut a_values = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let truncated = v.truncated(c)?;
        a_values.push(solve_radial(&truncated, mu, n)?.a());
    }
    for (i, w) in a_values.windows(2).enumerate() {
        if w[1] < w[0] - MONOTONE_SLACK * w[0].abs() {
            return Err(Error::NotMonotone(format!(
                "a({}) = {} < a({}) = {}",
                cutoffs[i + 1],
                w[1],
                cutoffs[i],
                w[0]
            )));
        }
    }
    let k = a_values.len();
    let last = a_values[k - 1];
    let (limit, converged) = if k >= 3 {
        let (x0, x1, x2) = (a_values[k - 3], a_values[k - 2], a_values[k - 1]);
        let d1 = x1 - x0;
        let d2 = x2 - x1;
        let denom = d2 - d1;
        let scale = last.abs().max(f64::MIN_POSITIVE);
        if d2.abs() <= 1e-14 * scale {
            (x2, true)
        } else if denom.abs() > 0.0 && d2.abs() < d1.abs() {
            let lim = x2 - d2 * d2 / denom;
            (lim, (lim - x2).abs() <= 1e-3 * scale)
        } else {
            (x2, false)
        }
    } else if k == 2 {
        let scale = last.abs().max(f64::MIN_POSITIVE);
        (last, (a_values[1] - a_values[0]).abs() <= 1e-14 * scale)
    } else {
        (last, false)
    };
    Ok(InfiniteRangeResult {
        cutoffs: cutoffs.to_vec(),
        a_values,
        limit,
        converged,
    })
}
