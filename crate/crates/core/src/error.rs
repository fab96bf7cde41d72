use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("sample needs at least 2 values, got {len}")]
    TooShort { len: usize },

    #[error("non-finite value at position {position}")]
    NonFinite { position: usize },

    /// Correlation is undefined for a constant sample.
    #[error("zero variance{}", fmt_index(.index))]
    ZeroVariance { index: Option<usize> },

    #[error("dimension mismatch: expected {expected}, found {found}{}", fmt_index(.index))]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: Option<usize>,
    },

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("angle triple is not realizable by three unit vectors")]
    Infeasible,

    #[error("dimension {found} too small, need at least {needed}")]
    DimensionTooSmall { needed: usize, found: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("invalid index: {0}")]
    InvalidIndex(String),
}

fn fmt_index(index: &Option<usize>) -> String {
    match index {
        Some(i) => alloc::format!(" (item {i})"),
        None => String::new(),
    }
}
