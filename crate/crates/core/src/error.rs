use alloc::string::String;

/// Errors raised by the arithmetic, quotient and graph layers.
///
/// The variants are coarse on purpose: callers (the CLI in particular) map
/// them onto exit codes, and the message always names the violated
/// precondition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Malformed call, e.g. an empty list where at least one value is needed.
    #[error("usage error: {0}")]
    Usage(String),

    /// A mathematical precondition does not hold (gcd(m, N) != 1, k = 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured input (a modulus chain, a word, a unit) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Work would exceed a configured cap.
    #[error("resource cap exceeded: {what} needs {required}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        required: String,
        cap: u64,
    },

    /// A search ran to its cutoff before producing everything requested.
    #[error("search exhausted: found {found} of {requested} before cutoff {cutoff}")]
    Exhausted {
        found: usize,
        requested: usize,
        cutoff: u64,
    },

    /// Internal consistency failure; always a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
