use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid lattice or Fock parameters, or objects built on different lattices.
    #[error("configuration error: {0}")]
    Config(String),

    /// A call-site precondition does not hold (support, disjointness, nesting, ...).
    #[error("input error: {0}")]
    Input(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("size guard: {what} = {value} exceeds {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
