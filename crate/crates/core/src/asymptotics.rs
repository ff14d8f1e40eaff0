//! Density sweeps of the upper and lower bounds against the leading term
//! `4πμρ/|ln(ρa²)|`, with log-log fits of the relative errors.
//!
//! Densities are handled through `ln(ρa²)`, so values down to `1e-300`
//! never underflow.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lower_bound::{optimize_lower_bound, scheduled_report, ScheduleConstants};
use crate::numerics::fit::linear_fit;
use crate::potentials::{GasParameters, RadialPotential};
use crate::scattering::{solve_radial_with, ScatteringSolution, SolverOptions};
use crate::upper_bound::optimize_b_with;

pub const DEFAULT_DENSITIES: [f64; 6] = [1e-10, 1e-20, 1e-40, 1e-80, 1e-160, 1e-300];

/// Column order of the sweep CSV.
pub const CSV_COLUMNS: [&str; 14] = [
    "rho_a2",
    "a",
    "b_opt",
    "upper",
    "eps",
    "ell",
    "R",
    "lower",
    "asymptote",
    "upper_ratio",
    "lower_ratio",
    "flags",
    "sched_lower",
    "sched_ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
    ScheduledLower,
    Asymptote,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::Upper,
        BoundKind::Lower,
        BoundKind::ScheduledLower,
        BoundKind::Asymptote,
    ];
}

/// Least-squares window for the error-exponent fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitSettings {
    /// Number of smallest densities used in each fit.
    pub points: usize,
    pub upper_slope: [f64; 2],
    pub lower_slope: [f64; 2],
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            points: 3,
            upper_slope: [-1.15, -0.85],
            lower_slope: [-0.30, -0.12],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// `ρa²` values, strictly decreasing, each in `(0, e^{-1})`.
    pub densities: Vec<f64>,
    pub potential: RadialPotential,
    pub mu: f64,
    pub outputs: Vec<BoundKind>,
    pub schedule: ScheduleConstants,
    pub fit: FitSettings,
    pub solver: SolverOptions,
    /// Golden-section tolerance on `ln b`.
    pub b_tolerance: f64,
}

impl SweepSpec {
    pub fn new(potential: RadialPotential, mu: f64) -> Self {
        Self {
            densities: DEFAULT_DENSITIES.to_vec(),
            potential,
            mu,
            outputs: BoundKind::ALL.to_vec(),
            schedule: ScheduleConstants::default(),
            fit: FitSettings::default(),
            solver: SolverOptions::default(),
            b_tolerance: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.densities.is_empty() {
            return Err(Error::Config("no densities given".into()));
        }
        let cap = (-1.0f64).exp();
        if let Some(d) = self.densities.iter().find(|&&d| !(d > 0.0 && d < cap)) {
            return Err(Error::Config(format!("density rho a^2 = {d} is outside (0, e^-1)")));
        }
        if self.densities.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("densities must be strictly decreasing".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if self.potential.tail().is_some() {
            return Err(Error::Config("bounds need a compactly supported potential".into()));
        }
        if self.fit.points < 2 {
            return Err(Error::Config("fits need at least two points".into()));
        }
        Ok(())
    }

    fn wants(&self, kind: BoundKind) -> bool {
        self.outputs.is_empty() || self.outputs.contains(&kind)
    }
}

/// One density. Missing values mean "not requested" or "invalid"; the
/// reason is in `flags`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub rho_a2: f64,
    pub log_gauge: f64,
    pub a: f64,
    pub b_opt: Option<f64>,
    pub upper: Option<f64>,
    pub epsilon: Option<f64>,
    pub ell: Option<f64>,
    pub r: Option<f64>,
    pub lower: Option<f64>,
    pub asymptote: f64,
    pub upper_ratio: Option<f64>,
    pub lower_ratio: Option<f64>,
    pub sched_lower: Option<f64>,
    pub sched_ratio: Option<f64>,
    pub flags: Vec<String>,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        self.flags.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `ρa²` values that entered the fit.
    pub densities: Vec<f64>,
    pub window: [f64; 2],
    pub within_window: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub a: f64,
    pub ln_a: f64,
    pub mu: f64,
    pub outputs: Vec<BoundKind>,
    pub rows: Vec<SweepRow>,
    /// `ln(upper_ratio - 1)` against `ln|ln ρa²|`
    pub upper_fit: ExponentFit,
    /// `ln(1 - lower_ratio)` against `ln|ln ρa²|`
    pub lower_fit: ExponentFit,
    pub scheduled_fit: ExponentFit,
}

impl SweepTable {
    pub fn all_valid(&self) -> bool {
        self.rows.iter().all(SweepRow::is_valid)
    }

    /// All rows valid and every requested fit inside its window.
    pub fn passes(&self) -> bool {
        let mut ok = self.all_valid();
        if self.outputs.is_empty() || self.outputs.contains(&BoundKind::Upper) {
            ok &= self.upper_fit.within_window;
        }
        if self.outputs.is_empty() || self.outputs.contains(&BoundKind::Lower) {
            ok &= self.lower_fit.within_window;
        }
        ok
    }
}

fn evaluate_row(spec: &SweepSpec, sol: &ScatteringSolution, rho_a2: f64) -> SweepRow {
    let ln_a = sol.ln_a();
    let log_gauge = -rho_a2.ln();
    let rho = (-log_gauge - 2.0 * ln_a).exp();
    let gas = GasParameters { mu: spec.mu, rho };
    let asymptote = 4.0 * PI * spec.mu * rho / log_gauge;
    let mut row = SweepRow {
        rho_a2,
        log_gauge,
        a: sol.a(),
        b_opt: None,
        upper: None,
        epsilon: None,
        ell: None,
        r: None,
        lower: None,
        asymptote,
        upper_ratio: None,
        lower_ratio: None,
        sched_lower: None,
        sched_ratio: None,
        flags: Vec::new(),
    };
    if spec.wants(BoundKind::Upper) {
        match optimize_b_with(&gas, sol, spec.b_tolerance) {
            Ok(rep) => {
                row.b_opt = Some(rep.b);
                row.upper = Some(rep.energy_per_particle);
                row.upper_ratio = Some(rep.ratio);
            }
            Err(e) => row.flags.push(format!("upper:{}", flag_name(&e))),
        }
    }
    let r0 = spec.potential.range();
    if spec.wants(BoundKind::Lower) {
        match optimize_lower_bound(&gas, ln_a, r0, &spec.schedule) {
            Ok(rep) if rep.valid => {
                row.epsilon = Some(rep.params.epsilon);
                row.ell = Some(rep.params.ell);
                row.r = Some(rep.params.r);
                row.lower = rep.energy_per_particle;
                row.lower_ratio = rep.leading_ratio;
            }
            Ok(rep) => row.flags.extend(rep.failed.iter().map(|f| format!("lower:{f}"))),
            Err(e) => row.flags.push(format!("lower:{}", flag_name(&e))),
        }
    }
    if spec.wants(BoundKind::ScheduledLower) {
        match scheduled_report(&gas, ln_a, r0, &spec.schedule) {
            Ok(rep) if rep.valid => {
                row.sched_lower = rep.energy_per_particle;
                row.sched_ratio = rep.leading_ratio;
            }
            Ok(rep) => row.flags.extend(rep.failed.iter().map(|f| format!("sched:{f}"))),
            Err(e) => row.flags.push(format!("sched:{}", flag_name(&e))),
        }
    }
    if let (Some(lo), Some(up)) = (row.lower, row.upper) {
        if lo > up {
            row.flags.push("sandwich".into());
        }
    }
    row
}

fn flag_name(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Precondition(_) => "precondition",
        Error::Inadmissible { .. } => "inadmissible",
        Error::Infeasible(_) => "infeasible",
        Error::Constraint(_) => "constraint",
        Error::Quadrature { .. } => "quadrature",
        Error::Ode { .. } => "ode",
        _ => "error",
    }
}

fn fit_exponent(rows: &[SweepRow], points: usize, window: [f64; 2], defect: impl Fn(&SweepRow) -> Option<f64>) -> ExponentFit {
    let tail = &rows[rows.len().saturating_sub(points)..];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut complete = true;
    for row in tail {
        match defect(row).filter(|d| *d > 0.0 && d.is_finite()) {
            Some(d) => {
                xs.push(row.log_gauge.ln());
                ys.push(d.ln());
            }
            None => complete = false,
        }
    }
    let fit = if complete && xs.len() >= 2 { linear_fit(&xs, &ys) } else { None };
    let slope = fit.map(|f| f.0);
    ExponentFit {
        slope,
        intercept: fit.map(|f| f.1),
        densities: tail.iter().map(|r| r.rho_a2).collect(),
        window,
        within_window: slope.is_some_and(|s| s >= window[0] && s <= window[1]),
    }
}

/// Solves the scattering problem once, then evaluates every density in
/// parallel. Per-density failures become row flags.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let sol = solve_radial_with(&spec.potential, spec.mu, 2, &spec.solver)?;
    if !(sol.a() > 0.0) {
        return Err(Error::Domain("scattering length is zero; rho a^2 is undefined".into()));
    }
    let rows: Vec<SweepRow> = spec
        .densities
        .par_iter()
        .map(|&d| evaluate_row(spec, &sol, d))
        .collect();
    let n = spec.fit.points;
    Ok(SweepTable {
        a: sol.a(),
        ln_a: sol.ln_a(),
        mu: spec.mu,
        outputs: spec.outputs.clone(),
        upper_fit: fit_exponent(&rows, n, spec.fit.upper_slope, |r| r.upper_ratio.map(|q| q - 1.0)),
        lower_fit: fit_exponent(&rows, n, spec.fit.lower_slope, |r| r.lower_ratio.map(|q| 1.0 - q)),
        scheduled_fit: fit_exponent(&rows, n, spec.fit.lower_slope, |r| r.sched_ratio.map(|q| 1.0 - q)),
        rows,
    })
}

fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.12e}"),
        _ => String::new(),
    }
}

pub fn to_csv(table: &SweepTable) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in &table.rows {
        let fields = [
            num(Some(r.rho_a2)),
            num(Some(r.a)),
            num(r.b_opt),
            num(r.upper),
            num(r.epsilon),
            num(r.ell),
            num(r.r),
            num(r.lower),
            num(Some(r.asymptote)),
            num(r.upper_ratio),
            num(r.lower_ratio),
            if r.flags.is_empty() { "ok".to_string() } else { r.flags.join(";") },
            num(r.sched_lower),
            num(r.sched_ratio),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Whitespace-separated columns `|ln ρa²|`, upper, lower and scheduled
/// ratios; `nan` marks a missing value.
pub fn to_plot_data(table: &SweepTable) -> String {
    let mut out = String::from("# log_gauge upper_ratio lower_ratio sched_ratio\n");
    let cell = |v: Option<f64>| v.filter(|x| x.is_finite()).map_or("nan".to_string(), |x| format!("{x:.12e}"));
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:.12e} {} {} {}",
            r.log_gauge,
            cell(r.upper_ratio),
            cell(r.lower_ratio),
            cell(r.sched_ratio)
        );
    }
    out
}

/// Writes `sweep.csv`, plus `plot.dat` when any bound kind was requested.
pub fn emit_report(table: &SweepTable, dir: &Path) -> Result<Vec<PathBuf>> {
    if table.rows.is_empty() {
        return Err(Error::Precondition("empty sweep table".into()));
    }
    fs::create_dir_all(dir)?;
    let csv = dir.join("sweep.csv");
    fs::write(&csv, to_csv(table))?;
    let mut written = vec![csv];
    if !table.outputs.is_empty() {
        let plot = dir.join("plot.dat");
        fs::write(&plot, to_plot_data(table))?;
        written.push(plot);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc_spec() -> SweepSpec {
        SweepSpec::new(RadialPotential::hard_disc(1.0).unwrap(), 1.0)
    }

    #[test]
    fn rejects_bad_densities() {
        let mut spec = disc_spec();
        spec.densities = vec![1e-3, 1e-2];
        assert!(spec.validate().is_err());
        spec.densities = vec![0.5];
        assert!(spec.validate().is_err());
        spec.densities = vec![];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn default_sweep_upper_side() {
        let mut spec = disc_spec();
        spec.outputs = vec![BoundKind::Upper, BoundKind::Asymptote];
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.rows.len(), 6);
        let ratios: Vec<f64> = t.rows.iter().map(|r| r.upper_ratio.unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        assert!(ratios.iter().all(|&q| q > 1.0));
        let slope = t.upper_fit.slope.unwrap();
        assert!((slope + 1.0).abs() < 0.15, "{slope}");
        assert!(t.all_valid());
    }

    #[test]
    fn csv_layout() {
        let mut spec = disc_spec();
        spec.densities = vec![1e-10, 1e-300];
        let t = run_sweep(&spec).unwrap();
        let csv = to_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 3);
        for l in &lines[1..] {
            let fields: Vec<&str> = l.split(',').collect();
            assert_eq!(fields.len(), CSV_COLUMNS.len());
            for (i, f) in fields.iter().enumerate() {
                if i != 11 && !f.is_empty() {
                    assert!(f.parse::<f64>().unwrap().is_finite());
                }
            }
        }
        assert!(lines[1].contains("lower:infeasible"));
        assert!(!t.rows[1].flags.iter().any(|f| f.starts_with("lower")));
    }

    #[test]
    fn empty_outputs_write_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = disc_spec();
        spec.densities = vec![1e-20];
        spec.outputs.clear();
        let t = run_sweep(&spec).unwrap();
        let files = emit_report(&t, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert!(files[0].ends_with("sweep.csv"));
        spec.outputs = vec![BoundKind::Upper];
        let t = run_sweep(&spec).unwrap();
        assert_eq!(emit_report(&t, dir.path()).unwrap().len(), 2);
    }

    #[test]
    fn fit_needs_every_point() {
        let mut spec = disc_spec();
        spec.outputs = vec![BoundKind::Lower];
        spec.densities = vec![1e-40, 1e-80, 1e-160];
        let t = run_sweep(&spec).unwrap();
        assert!(t.lower_fit.slope.is_none());
        assert!(!t.passes());
    }
}
