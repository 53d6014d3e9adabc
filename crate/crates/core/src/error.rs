use thiserror::Error;

use crate::economy::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(ValidationReport),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("invalid step: {0}")]
    InvalidStep(f64),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("no interior solution: {0}")]
    NoInteriorSolution(String),

    #[error("no regime found: {0}")]
    NoRegimeFound(String),

    #[error("horizon too short: T = {0}")]
    HorizonTooShort(usize),

    #[error("inconsistent multipliers: {0}")]
    InconsistentMultipliers(String),

    #[error("period {0} outside the horizon")]
    OutOfHorizon(usize),

    #[error("wedge undefined: {0}")]
    WedgeUndefined(String),

    #[error("no flip in range: both endpoints are {0}")]
    NoFlipInRange(String),

    #[error("infeasible UBI level {0}")]
    InfeasibleUbi(f64),

    #[error("empty feasible set")]
    EmptyFeasibleSet,

    #[error("indeterminate regime: {0}")]
    IndeterminateRegime(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
