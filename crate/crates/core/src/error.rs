use thiserror::Error;

use crate::lattice::LatticeVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p must be nonzero")]
    ZeroDirection,

    #[error("slice through {qhat} is collinear with p = {p}")]
    CollinearSlice {
        qhat: LatticeVector,
        p: LatticeVector,
    },

    #[error("alpha must be unimodular, got |alpha| = {0}")]
    NotUnimodular(f64),

    #[error(
        "window [{lo}, {hi}] is not covered by the coefficient range [{range_lo}, {range_hi}]"
    )]
    WindowOutOfRange {
        lo: i64,
        hi: i64,
        range_lo: i64,
        range_hi: i64,
    },

    #[error("slice through {0} has no in-disk indices")]
    NoInDiskPoints(LatticeVector),

    #[error("box half-width {k} too small, need at least {min}")]
    BoxTooSmall { k: i64, min: i64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("QR iteration did not converge; {} of {size} eigenvalues found", partial.len())]
    NoConvergence {
        size: usize,
        partial: Vec<num_complex::Complex64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time step {dt} violates the stability guard, need dt <= {max_dt}")]
    StepTooLarge { dt: f64, max_dt: f64 },

    #[error("state is identically zero")]
    ZeroState,

    #[error("mismatched box: state has {got} modes, operator has {expected}")]
    BoxMismatch { got: usize, expected: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
