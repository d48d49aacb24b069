use thiserror::Error;

pub type Result<T> = std::result::Result<T, DqlsError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DqlsError {
    #[error("invalid tensor space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid neighborhood: {0}")]
    InvalidNeighborhood(String),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("density matrix is invalid: {0}")]
    InvalidDensity(String),

    #[error("invalid graph edge ({0}, {1})")]
    InvalidEdge(usize, usize),

    #[error("the zero operator has no support")]
    ZeroOperator,

    #[error("support fills the whole space; nothing to stabilize")]
    FullSupport,

    #[error("invalid gains: {0}")]
    InvalidGains(String),

    #[error("target is not a common eigenvector of noise operator {index} (residual {residual:.3e})")]
    NotCommonEigenvector { index: usize, residual: f64 },

    #[error("target is not DQLS under the given locality pattern (intersection dimension {intersection_dim})")]
    NotDqls { intersection_dim: usize },

    #[error("dimension {dim} exceeds the dense Liouvillian cap {cap}; use trajectory evidence instead")]
    DimensionCap { dim: usize, cap: usize },

    #[error("integration aborted at t = {t}: {reason}; try a smaller step (dt = {dt})")]
    IntegratorDrift { t: f64, dt: f64, reason: String },

    #[error("invalid switching schedule: {0}")]
    InvalidSchedule(String),

    #[error("eigensolver failed to converge: {0}")]
    Eigensolver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Io(String),
}

impl DqlsError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            DqlsError::Parse(_) => 2,
            DqlsError::InvalidSpace(_)
            | DqlsError::DimensionMismatch(_)
            | DqlsError::InvalidNeighborhood(_)
            | DqlsError::NotNormalized { .. }
            | DqlsError::InvalidEdge(..) => 3,
            DqlsError::NotDqls { .. } => 4,
            DqlsError::DimensionCap { .. } => 5,
            DqlsError::IntegratorDrift { .. } => 6,
            _ => 1,
        }
    }
}
