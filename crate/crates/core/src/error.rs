use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs at least 2 steps per axis, got {0}")]
    GridTooCoarse(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("tolerance must be nonnegative, got {0}")]
    NegativeTolerance(f64),

    #[error("strategy profile outside the strategy box: {0}")]
    ProfileOutOfBounds(String),

    #[error("dominance is only defined for users 1 and 2")]
    NotAUser,

    #[error("invalid function specification: {0}")]
    InvalidSpec(String),

    #[error("improper belief system: optimism {optimism} + pessimism {pessimism} exceeds 1")]
    ImproperBeliefs { optimism: f64, pessimism: f64 },

    #[error("invalid belief system: {0}")]
    InvalidBeliefs(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The ratio form of the activity-level condition divides by the
    /// pessimistic fee sum and the residual activity; both must be nonzero.
    #[error("pessimistic income is zero ({0}); the ratio form is undefined")]
    ZeroPessimisticIncome(String),

    #[error("region resolution must be at least 2, got {0}")]
    ResolutionTooCoarse(usize),
}
