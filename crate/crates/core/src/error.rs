use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("differential requested on a degree-{0} section; degree must be at most 2")]
    DegreeTooHigh(usize),

    #[error("cosymplectic pair is degenerate at the point (residual {residual:.3e}, smallest singular value {min_singular:.3e})")]
    Degenerate { residual: f64, min_singular: f64 },

    #[error("section is not a 1-cocycle: max |d alpha| = {residual:.3e}")]
    NotCocycle { residual: f64 },

    #[error("integration aborted at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("model: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
