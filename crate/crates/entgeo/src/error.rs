use thiserror::Error;

/// Errors surfaced by construction and by the norm solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Bounds(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(
        "unsupported shape: the construction needs the last factor dimension \
         to dominate, n_N >= n_1*...*n_(N-1) (got n_N = {last}, product = {rest_product})"
    )]
    UnsupportedShape { last: usize, rest_product: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
