//! Shared fixtures for the benchmarks.

use bose2d::{solve_radial, GasParameters, Piece, Profile, RadialPotential, ScatteringSolution};

/// Three-step potential with a small hard core.
pub fn stepped_potential() -> RadialPotential {
    RadialPotential::piecewise(
        0.1,
        vec![
            Piece::new(0.1, 0.4, Profile::Constant(20.0)),
            Piece::new(0.4, 0.8, Profile::Constant(5.0)),
            Piece::new(0.8, 1.0, Profile::Constant(1.0)),
        ],
    )
    .expect("valid potential")
}

pub fn square_well_solution() -> ScatteringSolution {
    solve_radial(&RadialPotential::square_well(4.0, 1.0).expect("valid"), 1.0, 2).expect("solvable")
}

/// Gas at dimensionless density `rho_a2` for the given solution.
pub fn gas(solution: &ScatteringSolution, rho_a2: f64) -> GasParameters {
    GasParameters::new(1.0, (rho_a2.ln() - 2.0 * solution.ln_a()).exp()).expect("positive density")
}
