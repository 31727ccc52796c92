use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value outside the domain of the operation (bad m/r, wrong length, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The exhaustive oracle was asked to search more codewords than allowed.
    #[error("exhaustive search over 2^{k} codewords exceeds the cap of 2^{cap_log2}")]
    OracleCap { k: usize, cap_log2: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
