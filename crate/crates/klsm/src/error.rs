//! Library error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{a} is not invertible modulo {c}")]
    NotInvertible { a: i64, c: u64 },
    #[error("expected an odd integer, got {0}")]
    EvenInput(i64),
    #[error("matrix ({a},{b};{c},{d}) does not have determinant 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },
    #[error("matrix with lower-left entry {c} is not in Gamma0(4)")]
    NotInGamma0Of4 { c: i64 },
    #[error("modulus {0} exceeds the configured cap {1}")]
    ModulusOverflow(u128, u64),
    #[error("bad modulus {c}: {reason}")]
    BadModulus { c: u64, reason: &'static str },
    #[error("gamma has a pole at {0}")]
    PoleAtNonPositiveInteger(f64),
    #[error("inadmissible test-function parameters: {0}")]
    InadmissibleParams(String),
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),
    #[error("coefficient series has the wrong offset for this operation")]
    BadOffset,
    #[error("{d} and {c} are not coprime")]
    NotCoprime { d: i64, c: u64 },
    #[error("arithmetic function is not invertible: value at 1 must be 1")]
    NotInvertibleFunction,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
    #[error("cache format error: {0}")]
    CacheFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
