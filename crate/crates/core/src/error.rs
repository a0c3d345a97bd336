//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // Field construction and arithmetic.
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {order} exceeds the table cap of {cap} elements")]
    OrderTooLarge { order: u128, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element does not belong to this field")]
    ElementFromWrongField,
    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,
    #[error("no subfield of order {sub_order} in a field of order {order}")]
    NotASubfield { order: u64, sub_order: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("element is not primitive: multiplicative order {order}, expected {expected}")]
    NotPrimitive { order: u64, expected: u64 },

    // Cyclotomy.
    #[error("{n} does not divide {order} - 1")]
    BadOrderDivisor { n: u64, order: u64 },
    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: i64, bound: u64 },
    #[error("q = {q} violates q = 2^u + 1 (mod 2^(u+1)) for u = {u}: q mod {modulus} = {residue}")]
    CongruenceViolation { q: u64, u: u32, modulus: u64, residue: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // Character sums.
    #[error("{check} exceeded tolerance {tol:e}: residual {residual:e} ({detail})")]
    ToleranceExceeded { check: String, detail: String, residual: f64, tol: f64 },
    #[error("multiplicative characters are not defined at zero")]
    ZeroArgument,
    #[error("epsilon is not a root of unity of order {order}: residual {residual:e}")]
    EpsilonNotRootOfUnity { order: u64, residual: f64 },

    // Designs.
    #[error("blocks live in different fields")]
    MixedFields,
    #[error(
        "not a difference family: element {first} is represented {first_count} times, \
         element {second} {second_count} times"
    )]
    NotADifferenceFamily { first: u32, first_count: u64, second: u32, second_count: u64 },
    #[error("block {0} is not skew")]
    NotSkew(usize),
    #[error("difference-family criteria disagree: {0}")]
    CriteriaMismatch(String),

    // Matrices.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no block assignment produced a certified skew Hadamard matrix")]
    AssemblyMismatch,
    #[error("no Hadamard array is available for {0} blocks")]
    UnsupportedBlockCount(usize),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}
