use thiserror::Error;

/// Errors shared across the whole computation stack.
///
/// The precision-related variants are deliberately loud: a congruence check
/// that cannot be decided at the working precision must fail with
/// `PrecisionExhausted` rather than silently pass.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p = {p} divides {n}; ramified cyclotomic layer unsupported")]
    RamifiedCyclotomic { p: u64, n: u64 },

    #[error("precision exhausted: needed {needed} base-p digits, have {have}")]
    PrecisionExhausted { needed: u32, have: u32 },

    #[error("element is not a unit at the working prime")]
    NotAUnit,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("character with p-power value order beyond the Teichmuller component is unsupported")]
    WildCharacter,

    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(u64, u64),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pivot valuation ambiguous at precision {prec}")]
    AmbiguousPivot { prec: u32 },

    #[error("slope {0} does not separate at the working precision; need at least P = {1}")]
    SlopeSeparation(String, u32),

    #[error("root lies outside the supported extension (degree cap {cap})")]
    RootsOutsideTower { cap: usize },

    #[error("unknown operator label: {0}")]
    UnknownLabel(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("eigensystem refinement unstable at prime bound {bound}; increase the bound")]
    RefinementUnstable { bound: u64 },

    #[error("ambiguous transfer match at threshold: {0}")]
    AmbiguousMatch(String),

    #[error("eigensystem set size mismatch: {left} vs {right} (slope-dimension violation)")]
    SizeMismatch { left: usize, right: usize },

    #[error("computation budget exceeded: {0}")]
    Budget(String),

    #[error("cache i/o: {0}")]
    Cache(String),

    #[error("{0}")]
    Msg(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
