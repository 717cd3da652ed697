use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("shift is not a multiple of the grid spacing: {0}")]
    NonAlignedShift(String),
    #[error("frequency is not a multiple of 1/period: {0}")]
    NonAlignedFrequency(String),
    #[error("lattice is not aligned with the grid: {0}")]
    NonAlignedLattice(String),
    #[error("adjoint lattice is not aligned with the grid: {0}")]
    NonAlignedAdjointLattice(String),
    #[error("signals live on different grids")]
    GridMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient array does not match the lattice: expected {expected} entries, got {got}")]
    IndexMismatch { expected: usize, got: usize },
    #[error("refusing to allocate {entries} entries (limit {limit})")]
    ResourceLimit { entries: usize, limit: usize },
    #[error("system is not a frame: lower bound {lower:e} <= tolerance {tol:e}")]
    NotAFrame { lower: f64, tol: f64 },
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("translated window supports overlap at node {node}")]
    OverlappingSupports { node: usize },
    #[error("space {0} is not solid")]
    NotSolid(String),
    #[error("mixed norms need a product (diagonal) lattice")]
    NotProductLattice,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
