use thiserror::Error;

/// Errors shared across the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("field size {p}^{r} exceeds the 2^16 cap")]
    FieldTooLarge { p: u64, r: u32 },
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is the identity")]
    IdentityMatrix,
    #[error("orbit exceeded the configured limit of {0} points")]
    OrbitLimitExceeded(usize),
    #[error("point is not in the orbit")]
    PointNotInOrbit,
    #[error("chain is not complete")]
    IncompleteChain,
    #[error("element is not a member of the group")]
    NotAMember,
    #[error("group order exceeds the enumeration cap of {0}")]
    GroupTooLarge(u64),
    #[error("strong generating set exceeded the cap of {0} elements")]
    GeneratorBlowup(usize),
    #[error("no non-identity generators supplied")]
    NoGenerators,
    #[error("zero vector cannot seed a projective point")]
    ZeroVector,
    #[error("dimension {0} exceeds the cap of {1} for this heuristic")]
    DimensionTooLarge(usize, usize),
    #[error("word refers to generator index {0}, but only {1} exist")]
    InvalidWord(usize, usize),
    #[error("relator word does not evaluate to the identity")]
    BadRelator,
    #[error("bad dimension {0} for group constructor")]
    BadDimension(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
