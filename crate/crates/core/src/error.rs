use alloc::string::String;

/// Errors raised by the core routines.
///
/// Variants fall in three families that the command line maps to exit
/// codes: contract/precondition violations, resource limits, and numeric
/// failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("`{name}` = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("index {index} out of range (length {len})")]
    OutOfRange { index: u64, len: u64 },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("set is empty; dimension is undefined")]
    EmptySet,

    #[error("objective is not finite at theta = {theta}")]
    NonFinite { theta: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { name, value, domain }
    }

    /// True for resource-limit errors (memory guard, index capacity).
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
