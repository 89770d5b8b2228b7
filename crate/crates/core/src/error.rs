use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field extension degree must be at least 1, got {0}")]
    BadExtensionDegree(u32),
    #[error("{what} size {size} exceeds cap {cap}")]
    SizeCap { what: &'static str, size: u128, cap: u128 },
    #[error("element encoding {value} is out of range for a field of order {q}")]
    ElementOutOfRange { value: u32, q: u32 },
    #[error("operands come from different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("frobenius exponent {s} out of range 0..{m}")]
    ExponentOutOfRange { s: u32, m: u32 },
    #[error("map is not a field automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("span is the zero subspace")]
    ZeroSpan,
    #[error("span is the whole space, which is not a vertex")]
    FullSpan,
    #[error("vertex set is empty for ambient dimension {0}")]
    EmptyVertexSet(usize),
    #[error("unknown vertex id {0}")]
    BadVertex(usize),
    #[error("closed form is not an exact integer: {0}")]
    FormulaIntegrity(String),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("requires ambient dimension n >= 3, got {0}")]
    TheoremDimension(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("search limit of {limit} nodes exceeded after finding {found} automorphisms")]
    SearchLimit { limit: u64, found: u64 },
}
