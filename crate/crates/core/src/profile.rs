//! Radial functions f(r) with derivatives, used as trial functions.

use std::sync::Arc;

pub trait RadialProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Radii where the profile may be non-smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantProfile(pub f64);

impl RadialProfile for ConstantProfile {
    fn value(&self, _r: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _r: f64) -> f64 {
        0.0
    }
}

/// Profile built from closures for the value and the derivative.
#[derive(Clone)]
pub struct FnProfile {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breaks: Vec<f64>,
}

impl FnProfile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            breaks: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl RadialProfile for FnProfile {
    fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (self.derivative)(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// C¹ piecewise-cubic Hermite interpolant through `(r_i, f_i, f'_i)`,
/// held constant outside the knot range.
#[derive(Debug, Clone)]
pub struct HermiteSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteSpline {
    /// Knots must be strictly increasing; all three slices have equal length ≥ 2.
    pub fn new(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(knots.len() >= 2 && knots.len() == values.len() && knots.len() == slopes.len());
        assert!(knots.windows(2).all(|w| w[1] > w[0]), "knots must increase");
        Self {
            knots,
            values,
            slopes,
        }
    }

    fn locate(&self, r: f64) -> Option<usize> {
        let n = self.knots.len();
        if r < self.knots[0] || r > self.knots[n - 1] {
            return None;
        }
        let i = self.knots.partition_point(|&k| k <= r);
        Some(i.clamp(1, n - 1) - 1)
    }
}

impl RadialProfile for HermiteSpline {
    fn value(&self, r: f64) -> f64 {
        match self.locate(r) {
            None if r < self.knots[0] => self.values[0],
            None => *self.values.last().unwrap(),
            Some(i) => hermite(
                r,
                self.knots[i],
                self.knots[i + 1],
                self.values[i],
                self.values[i + 1],
                self.slopes[i],
                self.slopes[i + 1],
            )
            .0,
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        match self.locate(r) {
            None => 0.0,
            Some(i) => hermite(
                r,
                self.knots[i],
                self.knots[i + 1],
                self.values[i],
                self.values[i + 1],
                self.slopes[i],
                self.slopes[i + 1],
            )
            .1,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.knots.clone()
    }
}

/// Cubic Hermite value and derivative on `[x0, x1]`.
pub(crate) fn hermite(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -6.0 * t2 + 6.0 * t;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

/// Quintic Hermite value and derivative on `[x0, x1]` from endpoint values
/// and first and second derivatives.
pub(crate) fn quintic(x: f64, x0: f64, x1: f64, left: [f64; 3], right: [f64; 3]) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let [y0, d0, s0] = left;
    let [y1, d1, s1] = right;
    let (a0, a1, a2) = (y0, h * d0, h * h * s0);
    let (b0, b1, b2) = (y1, h * d1, h * h * s1);
    let value = a0 * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
        + a1 * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
        + a2 * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5)
        + b2 * (0.5 * t3 - t4 + 0.5 * t5)
        + b1 * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
        + b0 * (10.0 * t3 - 15.0 * t4 + 6.0 * t5);
    let slope = a0 * (-30.0 * t2 + 60.0 * t3 - 30.0 * t4)
        + a1 * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
        + a2 * (t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4)
        + b2 * (1.5 * t2 - 4.0 * t3 + 2.5 * t4)
        + b1 * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
        + b0 * (30.0 * t2 - 60.0 * t3 + 30.0 * t4);
    (value, slope / h)
}
