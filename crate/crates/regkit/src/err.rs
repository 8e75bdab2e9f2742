//! Error type shared by the whole crate.

use std::fmt;

/// Failure modes of the library, grouped by how the command line driver
/// reports them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegError {
    /// Invalid parameters: bad prime, `c` not a unit congruent to 1 mod p,
    /// nonsensical truncation or precision requests.
    BadConfig(String),
    /// A request that the implementation deliberately refuses, such as
    /// evaluation of the regulator series at a unit argument.
    Unsupported(String),
    /// The requested output precision cannot be certified from the inputs.
    PrecisionExhausted(String),
    /// An internal consistency audit failed.
    AuditFailure(String),
    /// A mathematical precondition does not hold for the given operands
    /// (division by a non-unit, nonzero residue under integration, ...).
    Domain(String),
}

impl fmt::Display for RegError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegError::BadConfig(m) => write!(f, "bad config: {m}"),
            RegError::Unsupported(m) => write!(f, "unsupported: {m}"),
            RegError::PrecisionExhausted(m) => write!(f, "precision exhausted: {m}"),
            RegError::AuditFailure(m) => write!(f, "audit failure: {m}"),
            RegError::Domain(m) => write!(f, "domain error: {m}"),
        }
    }
}

impl std::error::Error for RegError {}
