use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("omega = {omega} is not a unit modulo n = {n}")]
    NotCoprime { omega: i64, n: u64 },
    #[error("coloring modulus c = {c} does not divide n = {n}")]
    NotDivisor { c: u64, n: u64 },
    #[error("n = {n} exceeds the size cap {max}")]
    TooLarge { n: u64, max: u64 },
    #[error("{what} must be positive")]
    NotPositive { what: &'static str },
    #[error("coefficient overflow while reducing t^k modulo the {d}th cyclotomic polynomial")]
    Overflow { d: u64 },
    #[error("expected {expected} angles, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("grid sampling needs {per_axis}^{arity} points, more than the limit {limit}")]
    SampleBudget {
        per_axis: u64,
        arity: usize,
        limit: u64,
    },
    #[error("palette has {got} colors but {needed} classes must be drawn")]
    PaletteTooSmall { needed: usize, got: usize },
    #[error("layer order is not a permutation of the class ids 0..{class_count}")]
    InvalidLayerOrder { class_count: usize },
    #[error("canvas dimensions must be positive, got {width}x{height}")]
    InvalidDimension { width: u32, height: u32 },
}
