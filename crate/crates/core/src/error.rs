use thiserror::Error;

use crate::bench::SymmetryReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("malformed CSR structure: {0}")]
    MalformedCsr(String),

    #[error("mask member {index} is invalid for a universe of size {universe}")]
    InvalidMask { index: usize, universe: usize },

    #[error("row {row} has no stored diagonal entry")]
    MissingDiagonal { row: usize },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("grid coordinate ({ix}, {iy}, {iz}) outside {nx}x{ny}x{nz} grid")]
    CoordinateOutOfRange {
        ix: usize,
        iy: usize,
        iz: usize,
        nx: usize,
        ny: usize,
        nz: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension {dim} = {size} is incompatible with divisor {divisor}")]
    Indivisible { dim: char, size: usize, divisor: usize },

    #[error("level has no coarser level to transfer to")]
    NoCoarserLevel,

    #[error("CG breakdown at iteration {iteration}: p'Ap = {curvature:e}")]
    Breakdown { iteration: usize, curvature: f64 },

    #[error("no node grid factorization of p = {p} divides {nx}x{ny}x{nz}")]
    NoFactorization { p: usize, nx: usize, ny: usize, nz: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("symmetry test failed (matrix: {}, preconditioner: {})",
        if .0.matrix.passed { "pass" } else { "FAIL" },
        if .0.preconditioner.passed { "pass" } else { "FAIL" })]
    SymmetryFailure(Box<SymmetryReport>),

    #[error("failed to build thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
