use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by an enclosure that contains zero")]
    DivisionByZero,

    #[error("singular input: {0}")]
    Singular(String),

    #[error("series expansion did not resolve the singularity up to order {0}")]
    ExpansionCap(usize),

    #[error("invalid integration limits: {0}")]
    InvalidLimits(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("group closure exceeded {0} elements")]
    GroupCap(usize),

    #[error("invalid shift vector: {0}")]
    InvalidShift(String),

    #[error("singular system: pivot {index} encloses zero (increase precision or C)")]
    SingularSystem { index: usize },

    #[error("tail estimate {achieved:.3e} exceeds tolerance {tolerance:.3e} for entry ({i}, {j}); increase C")]
    TailTolerance { i: usize, j: usize, achieved: f64, tolerance: f64 },

    #[error("normalization c^T b encloses zero")]
    Normalization,

    #[error("gram entry ({i}, {j}): {source}")]
    GramEntry {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cache corrupt: {0}")]
    CacheCorrupt(String),

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numerics (singular systems, tails, expansions).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::DivisionByZero
            | Error::Singular(_)
            | Error::ExpansionCap(_)
            | Error::SingularSystem { .. }
            | Error::TailTolerance { .. }
            | Error::Normalization => true,
            Error::GramEntry { source, .. } => source.is_numeric(),
            _ => false,
        }
    }

    pub fn is_cache(&self) -> bool {
        matches!(self, Error::CacheCorrupt(_) | Error::CacheMismatch(_))
    }
}
