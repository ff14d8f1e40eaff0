//! Derivative-free minimizers: golden-section search and Nelder–Mead.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x_min, f_min)` once the bracket is narrower than `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
}

/// Nelder–Mead minimization from `start`, with the initial simplex built
/// by offsetting each coordinate by `step[i]`. Runs exactly `iterations`
/// iterations unless the simplex collapses below `ftol` in spread.
pub fn nelder_mead<const N: usize, F: FnMut(&[f64; N]) -> f64>(
    mut f: F,
    start: [f64; N],
    step: [f64; N],
    iterations: usize,
    ftol: f64,
) -> SimplexResult<N> {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] += step[i];
        let v = f(&p);
        simplex.push((p, v));
    }
    let mut it = 0;
    while it < iterations {
        it += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) {
            break;
        }
        let mut centroid = [0.0; N];
        for (p, _) in simplex.iter().take(N) {
            for j in 0..N {
                centroid[j] += p[j] / N as f64;
            }
        }
        let along = |t: f64, p: &[f64; N]| {
            let mut q = [0.0; N];
            for j in 0..N {
                q[j] = centroid[j] + t * (p[j] - centroid[j]);
            }
            q
        };
        let worst_p = simplex[N].0;
        let reflected = along(-1.0, &worst_p);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0, &worst_p);
            let fe = f(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[N].1 {
                let c = along(-0.5, &worst_p);
                let v = f(&c);
                (c, v)
            } else {
                let c = along(0.5, &worst_p);
                let v = f(&c);
                (c, v)
            };
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (contracted, fc);
            } else {
                let best_p = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let mut q = [0.0; N];
                    for j in 0..N {
                        q[j] = best_p[j] + 0.5 * (entry.0[j] - best_p[j]);
                    }
                    *entry = (q, f(&q));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations: it,
    }
}
