//! Numerical building blocks shared by the physics modules.

pub mod fit;
pub mod ode;
pub mod optimize;
pub mod quadrature;
pub mod special;
