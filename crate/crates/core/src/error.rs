use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),
    #[error("kernel evaluated at the origin")]
    OriginSingularity,
    #[error("|x'| = {radius} is inside the exclusion radius {min_radius}")]
    TooCloseToSupport { radius: f64, min_radius: f64 },
    #[error("tolerance not met in {context}: coarse {coarse:e}, fine {fine:e}")]
    ToleranceNotMet {
        context: &'static str,
        coarse: f64,
        fine: f64,
    },
    #[error("cache miss: {0}")]
    CacheMiss(String),
    #[error("height {0} exceeds the near-wall limit 0.1")]
    HeightTooLarge(f64),
    #[error("ambiguous sign near t = {0}")]
    AmbiguousSign(f64),
    #[error("M(t) has no zero in (0, 2)")]
    MissingT0Star,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the `bls` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ToleranceNotMet { .. } | Error::AmbiguousSign(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
