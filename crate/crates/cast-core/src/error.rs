use core::fmt;

/// Error type shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum CastError {
    /// A dimension or index is outside its valid range.
    IndexOutOfRange { what: &'static str, value: usize, limit: usize },
    /// Lengths of two coupled vectors disagree.
    DimensionMismatch { what: &'static str, left: usize, right: usize },
    /// An argument violated a documented precondition.
    InvalidArgument(&'static str),
    /// Requested sparsity exceeds the available orthogonal set.
    SparsityTooLarge { k: usize, available: usize },
    /// The reduced system is numerically rank deficient.
    RankDeficient,
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureNotConverged { achieved: f64, requested: f64 },
    /// A TDD pattern contains no uplink subframe.
    NoUplinkSubframe,
}

impl fmt::Display for CastError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CastError::IndexOutOfRange { what, value, limit } => {
                write!(f, "{what} = {value} out of range (limit {limit})")
            }
            CastError::DimensionMismatch { what, left, right } => {
                write!(f, "dimension mismatch in {what}: {left} vs {right}")
            }
            CastError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            CastError::SparsityTooLarge { k, available } => {
                write!(f, "sparsity k = {k} exceeds orthogonal set size {available}")
            }
            CastError::RankDeficient => write!(f, "reduced system is rank deficient"),
            CastError::QuadratureNotConverged { achieved, requested } => {
                write!(f, "quadrature reached {achieved:e}, requested {requested:e}")
            }
            CastError::NoUplinkSubframe => write!(f, "TDD pattern has no uplink subframe"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for CastError {}
