use crate::family::SetMask;

/// Errors produced by the library.
///
/// The variants map onto the three ways an operation can refuse work:
/// malformed text, inputs that break a precondition, and requests that
/// are well-formed but too large for the exhaustive routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("layer {level}: {set} is not covered by the {condition}")]
    LayerPrecondition {
        level: usize,
        set: SetMask,
        condition: &'static str,
    },

    #[error("capability exceeded: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
