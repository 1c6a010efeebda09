use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("extended gcd of two zero polynomials")]
    BothZero,
    #[error("polynomial is not invertible modulo the given modulus")]
    NotInvertible,
    #[error("modulus must have degree at least 1")]
    DegenerateModulus,

    #[error("initial state is all zero")]
    ZeroState,
    #[error("raw state has {got} bits, generator needs {expected}")]
    StateSize { expected: usize, got: usize },
    #[error("bit index {index} out of range for word size {w}")]
    BitIndex { index: usize, w: u32 },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("recovered characteristic polynomial has degree {got}, expected {expected}")]
    NotMaximal { expected: usize, got: usize },
    #[error("numerator h_0 is zero or shares a factor with P(z)")]
    DegenerateNumerator,

    #[error("lattice rows are linearly dependent")]
    DependentRows,
    #[error("sum of successive minima is {got}, determinant degree is {expected}")]
    SumRule { expected: usize, got: usize },
    #[error("dimension v = {v} out of range 1..={w}")]
    Dimension { v: usize, w: u32 },

    #[error("relation has no terms")]
    EmptyRelation,
    #[error("zero lattice vector has no relation")]
    ZeroVector,
    #[error("enumeration of 2^{vprime} vectors exceeds the budget of {budget}")]
    BudgetExceeded { vprime: usize, budget: u64 },

    #[error("oracle limit: {0}")]
    OracleLimit(String),

    #[error("invalid test parameters: {0}")]
    InvalidParams(String),
    #[error("Poisson mean must be positive, got {0}")]
    NonPositiveMean(f64),

    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
