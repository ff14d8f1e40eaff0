//! JSON run configuration and potential declarations.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{BoundKind, FitSettings, SweepSpec, DEFAULT_DENSITIES};
use crate::error::{Error, Result};
use crate::lower_bound::ScheduleConstants;
use crate::potentials::{Piece, Profile, RadialPotential};
use crate::scattering::SolverOptions;

/// Functional form of one piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSpec {
    Constant(f64),
    Polynomial(Vec<f64>),
    PowerLaw { coefficient: f64, exponent: f64 },
}

impl From<&ProfileSpec> for Profile {
    fn from(p: &ProfileSpec) -> Self {
        match p {
            ProfileSpec::Constant(c) => Profile::Constant(*c),
            ProfileSpec::Polynomial(c) => Profile::Polynomial(c.clone()),
            ProfileSpec::PowerLaw {
                coefficient,
                exponent,
            } => Profile::PowerLaw {
                coefficient: *coefficient,
                exponent: *exponent,
            },
        }
    }
}

/// `{"from": 0.0, "to": 1.0, "constant": 2.0}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub from: f64,
    pub to: f64,
    #[serde(flatten)]
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    HardDisc {
        radius: f64,
    },
    SquareWell {
        height: f64,
        range: f64,
    },
    Piecewise {
        #[serde(default)]
        hard_core: f64,
        pieces: Vec<PieceSpec>,
    },
    /// `coefficient · r^exponent` beyond `cutoff`; constant `inner` (default:
    /// continuous) between the hard core and the cutoff.
    PowerTail {
        #[serde(default)]
        hard_core: f64,
        cutoff: f64,
        coefficient: f64,
        exponent: f64,
        #[serde(default)]
        inner: Option<f64>,
    },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::HardDisc { radius: 1.0 }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<RadialPotential> {
        match self {
            PotentialSpec::HardDisc { radius } => RadialPotential::hard_disc(*radius),
            PotentialSpec::SquareWell { height, range } => RadialPotential::square_well(*height, *range),
            PotentialSpec::Piecewise { hard_core, pieces } => RadialPotential::piecewise(
                *hard_core,
                pieces
                    .iter()
                    .map(|p| Piece::new(p.from, p.to, Profile::from(&p.profile)))
                    .collect(),
            ),
            PotentialSpec::PowerTail {
                hard_core,
                cutoff,
                coefficient,
                exponent,
                inner,
            } => {
                let level = inner.unwrap_or(coefficient * cutoff.powf(*exponent));
                let pieces = if cutoff > hard_core {
                    vec![Piece::new(*hard_core, *cutoff, Profile::Constant(level))]
                } else {
                    Vec::new()
                };
                let tail = Profile::PowerLaw {
                    coefficient: *coefficient,
                    exponent: *exponent,
                };
                RadialPotential::new(*hard_core, pieces, *cutoff, Some(tail))
            }
        }
    }
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("not a number: {t:?}")))
        })
        .collect()
}

/// Short forms `hard_disc:R`, `square_well:HEIGHT,RANGE`,
/// `power_tail:CUTOFF,COEFFICIENT,EXPONENT`, or inline JSON.
impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected KIND:PARAMS, got {s:?}")))?;
        let v = numbers(args)?;
        match (kind, v.as_slice()) {
            ("hard_disc", [r]) => Ok(PotentialSpec::HardDisc { radius: *r }),
            ("square_well", [h, r]) => Ok(PotentialSpec::SquareWell { height: *h, range: *r }),
            ("power_tail", [c, k, p]) => Ok(PotentialSpec::PowerTail {
                hard_core: 0.0,
                cutoff: *c,
                coefficient: *k,
                exponent: *p,
                inner: None,
            }),
            _ => Err(Error::Config(format!("unrecognized potential {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Absolute tolerance of adaptive quadrature in the verification suites.
    pub quadrature: f64,
    /// Golden-section tolerance on `ln b`.
    pub optimizer: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = SolverOptions::default();
        Self {
            ode_rtol: s.rtol,
            ode_atol: s.atol,
            quadrature: 1e-12,
            optimizer: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub mu: f64,
    pub dimension: u32,
    pub rho: Option<f64>,
    pub rho_a2: Option<f64>,
    /// Sweep densities `ρa²`, strictly decreasing.
    pub densities: Vec<f64>,
    pub outputs: Vec<BoundKind>,
    pub tolerances: Tolerances,
    pub schedule: ScheduleConstants,
    pub fit: FitSettings,
    pub seed: u64,
    pub trials: usize,
    /// Output directory of `sweep`.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec::default(),
            mu: 1.0,
            dimension: 2,
            rho: None,
            rho_a2: None,
            densities: DEFAULT_DENSITIES.to_vec(),
            outputs: BoundKind::ALL.to_vec(),
            tolerances: Tolerances::default(),
            schedule: ScheduleConstants::default(),
            fit: FitSettings::default(),
            seed: 0,
            trials: 100,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("ode_rtol", t.ode_rtol),
            ("ode_atol", t.ode_atol),
            ("quadrature", t.quadrature),
            ("optimizer", t.optimizer),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Config(format!("dimension must be 1, 2 or 3, got {}", self.dimension)));
        }
        if let Some(r) = self.rho {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config(format!("rho must be positive, got {r}")));
            }
        }
        if let Some(r) = self.rho_a2 {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config(format!("rho_a2 must be positive, got {r}")));
            }
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            rtol: self.tolerances.ode_rtol,
            atol: self.tolerances.ode_atol,
            ..SolverOptions::default()
        }
    }

    /// `ρ` from `rho`, or else from `rho_a2` and `ln a`.
    pub fn density(&self, ln_a: f64) -> Result<f64> {
        match (self.rho, self.rho_a2) {
            (Some(r), _) => Ok(r),
            (None, Some(d)) => {
                let rho = (d.ln() - 2.0 * ln_a).exp();
                if rho > 0.0 && rho.is_finite() {
                    Ok(rho)
                } else {
                    Err(Error::Domain(format!("rho a^2 = {d} gives rho = {rho}")))
                }
            }
            (None, None) => Err(Error::Config("a density is required (rho or rho_a2)".into())),
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let mut spec = SweepSpec::new(self.potential.build()?, self.mu);
        spec.densities = self.densities.clone();
        spec.outputs = self.outputs.clone();
        spec.schedule = self.schedule;
        spec.fit = self.fit;
        spec.solver = self.solver_options();
        spec.b_tolerance = self.tolerances.optimizer;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms() {
        assert_eq!(
            "hard_disc:1.0".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::HardDisc { radius: 1.0 }
        );
        assert_eq!(
            "square_well:4,1.5".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::SquareWell { height: 4.0, range: 1.5 }
        );
        assert!("square_well:4".parse::<PotentialSpec>().is_err());
        assert!("lennard_jones:1,2".parse::<PotentialSpec>().is_err());
        let json = r#"{"kind":"hard_disc","radius":2.0}"#;
        assert_eq!(json.parse::<PotentialSpec>().unwrap(), PotentialSpec::HardDisc { radius: 2.0 });
    }

    #[test]
    fn piecewise_json() {
        let json = r#"{"kind":"piecewise","hard_core":0.2,"pieces":[
            {"from":0.2,"to":0.5,"constant":3.0},
            {"from":0.5,"to":1.0,"polynomial":[2.0,-1.0]},
            {"from":1.0,"to":2.0,"power_law":{"coefficient":1.0,"exponent":-2.0}}]}"#;
        let v = json.parse::<PotentialSpec>().unwrap().build().unwrap();
        assert_eq!(v.range(), 2.0);
        assert_eq!(v.hard_core_radius(), 0.2);
        assert!((v.value(0.75) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn power_tail_is_continuous() {
        let v = "power_tail:1.0,2.0,-6".parse::<PotentialSpec>().unwrap().build().unwrap();
        assert!(v.tail().is_some());
        assert!((v.value(0.5) - 2.0).abs() < 1e-15);
        assert!((v.value(2.0) - 2.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!(RunConfig::from_json(r#"{"mu": -1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"tolerances": {"ode_rtol": 0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let cfg = RunConfig::from_json(r#"{"potential": {"kind": "square_well", "height": 4, "range": 1},
            "densities": [1e-10, 1e-20], "outputs": ["upper"], "schedule": {"epsilon": 0.5}}"#)
        .unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.densities, vec![1e-10, 1e-20]);
        assert_eq!(spec.schedule.epsilon, 0.5);
        assert_eq!(spec.schedule.ell, 1.0);
    }

    #[test]
    fn density_from_rho_a2() {
        let cfg = RunConfig {
            rho_a2: Some(1e-300),
            ..RunConfig::default()
        };
        let rho = cfg.density(2.0f64.ln()).unwrap();
        assert!((rho / 0.25e-300 - 1.0).abs() < 1e-12);
        assert!(RunConfig::default().density(0.0).is_err());
    }
}
