use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the partition-distance routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("label sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input is empty")]
    Empty,

    #[error("matrix rows have unequal lengths (row {row} has {found} entries, expected {expected})")]
    Ragged { row: usize, found: usize, expected: usize },

    #[error("pair-based criteria need at least two objects, got n = {n}")]
    TooFewObjects { n: u64 },

    #[error("expected Rand distance is zero, so the adjustment is undefined")]
    DegenerateBaseline,

    #[error("maximum attainable value is zero, so the normalization is undefined")]
    DegenerateNormalization,

    #[error("cost matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} exceeds the exhaustive permutation limit of {max}")]
    TooLargeForBruteForce { dim: usize, max: usize },

    #[error("invalid dimensions r = {r}, s = {s}, n = {n}: {reason}")]
    InvalidDimensions { r: usize, s: usize, n: u64, reason: &'static str },

    #[error("n = {n} is not a multiple of r * s = {rs}")]
    NotMultiple { n: u64, rs: u64 },

    #[error("masses must sum to 1, got {sum}")]
    MassNotNormalized { sum: String },

    #[error("mass at ({row}, {col}) is negative")]
    NegativeMass { row: usize, col: usize },

    #[error("arithmetic overflow in exact computation")]
    Overflow,

    #[error("|N({r}, {s}, {n})| = {count} exceeds the enumeration threshold {limit}")]
    EnumerationTooLarge { r: usize, s: usize, n: u64, count: String, limit: u64 },

    #[error("set N({r}, {s}, {n}) is empty")]
    EmptySet { r: usize, s: usize, n: u64 },

    #[error("matrix must be square and diagonal")]
    NotDiagonal,

    #[error("{requested} moves requested but only {available} objects remain movable")]
    TooManyMoves { requested: u64, available: u64 },

    #[error("{0}")]
    Precondition(&'static str),
}
