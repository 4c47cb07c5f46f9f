use thiserror::Error;

/// Errors raised by operator construction, engines and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("operator is not Hermitian: defect {defect:e} exceeds {limit:e}")]
    NotHermitian { defect: f64, limit: f64 },

    #[error("operator is not positive: minimum eigenvalue {min_eig:e} below {limit:e}")]
    NotPositive { min_eig: f64, limit: f64 },

    #[error("density matrix trace {trace} differs from 1 by more than {limit:e}")]
    NotNormalized { trace: f64, limit: f64 },

    #[error("eigensolver did not converge (dim {dim}, max-norm {max_norm:e})")]
    EigenNonConvergence { dim: usize, max_norm: f64 },

    #[error("dense dimension {dim} exceeds cap {cap}")]
    DenseCapacity { dim: usize, cap: usize },

    #[error("type enumeration needs {count} classes (n={n}, d={d}), cap {cap}")]
    TypeClassCapacity { count: f64, n: usize, d: usize, cap: usize },

    #[error(
        "blocklength n={n} exceeds both engines: dense dim {dense_dim} > cap {dense_cap}; \
         type classes {type_count} > cap {type_cap}"
    )]
    EngineCapacity {
        n: usize,
        dense_dim: f64,
        dense_cap: usize,
        type_count: f64,
        type_cap: usize,
    },

    #[error("invalid subsystem shape: {0}")]
    InvalidShape(String),

    #[error("unknown subsystem label {0:?}")]
    UnknownLabel(String),

    #[error("empty keep set; use the total trace instead")]
    EmptyKeep,

    #[error("Kraus family is not trace preserving: defect {defect:e} exceeds {limit:e}")]
    NotTracePreserving { defect: f64, limit: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "target level {target} is not bracketable: tail ranges over [{low}, {high}] \
         after expanding the gamma bracket to [{gamma_lo}, {gamma_hi}]"
    )]
    Unbracketable {
        target: f64,
        low: f64,
        high: f64,
        gamma_lo: f64,
        gamma_hi: f64,
    },

    #[error("at blocklength n={n}: {source}")]
    AtBlocklength {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(n: usize, source: Error) -> Self {
        Error::AtBlocklength {
            n,
            source: Box::new(source),
        }
    }

    /// True when the root cause is a dense or type-class capacity limit.
    pub fn is_capacity(&self) -> bool {
        match self {
            Error::DenseCapacity { .. }
            | Error::TypeClassCapacity { .. }
            | Error::EngineCapacity { .. } => true,
            Error::AtBlocklength { source, .. } => source.is_capacity(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
