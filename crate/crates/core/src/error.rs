use thiserror::Error;

/// Errors raised by the spin and photon engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate state: norm {norm:e} is too small to define a direction")]
    DegenerateState { norm: f64 },

    /// The evolving state became orthogonal to the next projector.
    #[error("evolution killed at projection step {step}: overlap magnitude {overlap:e}")]
    EvolutionKilled { step: usize, overlap: f64 },

    #[error("unsupported step count {0}: closed forms need at least 3 steps")]
    UnsupportedStepCount(usize),

    #[error("degenerate polygon: vertices {index} and {next} are coincident or antipodal")]
    DegeneratePolygon { index: usize, next: usize },

    #[error("undefined connection: states {index} and {next} are orthogonal")]
    UndefinedConnection { index: usize, next: usize },

    #[error("unsupported polygon with {0} sides: at least 3 mirrors are required")]
    UnsupportedPolygon(usize),

    #[error("polarization is not linear (real); loop area is undefined")]
    NonLinearPolarization,

    #[error("polarization loop does not close: final tip differs from initial by {0:e}")]
    OpenLoop(f64),

    #[error("cannot fit convergence order: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
