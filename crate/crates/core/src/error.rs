use thiserror::Error;

/// Errors raised by the arithmetic, field and period routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {m}: {reason}")]
    InvalidModulus { m: u64, reason: &'static str },

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: u64, m: u64 },

    #[error("{a} has no square root modulo {p}")]
    NoRoot { a: u64, p: u64 },

    #[error("division by zero in the quadratic extension")]
    ZeroDivision,

    #[error("element has zero norm and is not a unit")]
    NormZero,

    #[error("the zero element has no multiplicative order")]
    ZeroElement,

    #[error("operation requires an inert (field) context")]
    WrongContext,

    #[error("operands belong to different quadratic contexts")]
    ContextMismatch,

    #[error("B = {b} shares a factor with modulus {m}; the sequence never returns to (0, 1)")]
    NotPurelyPeriodic { b: i64, m: u64 },

    #[error("iteration cap m^2 exceeded for modulus {m}")]
    CapExceeded { m: u64 },

    #[error("candidate exponent {candidate} does not annihilate the companion matrix modulo {m}")]
    BoundViolation { candidate: u128, m: u64 },

    #[error("modulus {m} is not supported by this method")]
    WrongModulus { m: u64 },

    #[error("{m} is not a prime power")]
    NotPrimePower { m: u64 },

    #[error("intermediate value overflowed 128 bits")]
    Overflow,

    #[error("period methods disagree for modulus {m}: {detail}")]
    MethodDisagreement { m: u64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
