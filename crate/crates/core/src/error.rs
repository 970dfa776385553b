use thiserror::Error;

use crate::formula::Lang;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("symbol `{symbol}` used with arity {found}, expected {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("not a {lang} formula: {detail}")]
    Language { lang: Lang, detail: String },
    #[error("bad signature: {0}")]
    Signature(String),
    #[error("assignment does not cover symbol `{0}`")]
    Uncovered(String),
    #[error("assigned formula for `{symbol}` has free variable `{var}` beyond its arity")]
    ExtraParameter { symbol: String, var: String },
    #[error("atom `{0}` is not a constant")]
    NonConstant(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bound exceeded: {0}")]
    Overflow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("{0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Short machine-readable category used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. }
            | Error::Arity { .. }
            | Error::Language { .. }
            | Error::Signature(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::InvalidModel(_)
            | Error::InvalidRule(_)
            | Error::Uncovered(_)
            | Error::ExtraParameter { .. }
            | Error::NonConstant(_)
            | Error::UnknownNode(_)
            | Error::Unbound(_)
            | Error::Unsupported(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::Overflow(_) => "overflow",
            Error::Inconsistency(_) => "internal",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
