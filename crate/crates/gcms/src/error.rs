use thiserror::Error;

use crate::shift_space::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcmsError {
    #[error("symbol must be at least 1")]
    ZeroSymbol,
    #[error("index ({0}, {1}) is outside the finite matrix")]
    OutOfRange(Symbol, Symbol),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("word {0} is not admissible")]
    NotAdmissible(String),
    #[error("root {0} is not in the accumulation catalog")]
    RootNotInCatalog(String),
    #[error("stem {stem} cannot end under root {root}")]
    BadStemForRoot { stem: String, root: u64 },
    #[error("the configuration has an empty stem")]
    EmptyStem,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, GcmsError>;
