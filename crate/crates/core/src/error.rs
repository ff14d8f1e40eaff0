use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("integration range [{lo}, {hi}] reaches into the hard core (radius {core}); the integrand is infinite there")]
    HardCoreInRange { lo: f64, hi: f64, core: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (estimated error {error:.3e})")]
    Quadrature { lo: f64, hi: f64, error: f64 },

    #[error("ODE solver failed at r = {radius}: {reason}")]
    Ode { radius: f64, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular discrete system at row {row}")]
    Singular { row: usize },

    #[error("density too high for b = {b}: rho*I = {rho_i} >= 1")]
    Inadmissible { b: f64, rho_i: f64 },

    #[error("lower-bound constraint violated: {0}")]
    Constraint(String),

    #[error("no feasible parameters: {0}")]
    Infeasible(String),

    #[error("sequence not monotone: {0}")]
    NotMonotone(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
