use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("plan length {length:.6} m exceeds the flight budget {budget:.6} m by {excess:.6} m")]
    InfeasiblePlan { length: f64, budget: f64, excess: f64 },

    #[error("no data collected (K = 0): the MSE is unbounded")]
    NoDataCollected,

    #[error("unknown site id {0}")]
    UnknownSite(usize),

    #[error("duplicate site id {0}")]
    DuplicateSite(usize),

    #[error("exhaustive search supports at most {max} nodes, scenario has {n}")]
    TooManyNodes { n: usize, max: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
