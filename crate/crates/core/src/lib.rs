//! Scattering lengths, variational upper bounds and Temple-type lower bounds
//! for the ground-state energy of a dilute two-dimensional Bose gas.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod asymptotics;
pub mod config;
pub mod dyson;
pub mod error;
pub mod lower_bound;
pub mod numerics;
pub mod potentials;
pub mod profile;
pub mod scattering;
pub mod suites;
pub mod upper_bound;

pub use asymptotics::{emit_report, run_sweep, BoundKind, SweepRow, SweepSpec, SweepTable};
pub use config::{PotentialSpec, RunConfig};
pub use error::{Error, Result};
pub use lower_bound::{LowerBoundReport, ScheduleConstants, SoftPotential};
pub use potentials::{GasParameters, Piece, Profile, RadialPotential, Weight};
pub use profile::{HermiteSpline, RadialProfile};
pub use scattering::{solve_radial, solve_radial_with, ScatteringSolution, SolverOptions};
pub use upper_bound::{TrialFunction, UpperBoundReport};
