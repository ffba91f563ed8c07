//! Periods of the recurrence `E_{n+1} = A E_n + B E_{n-1}` modulo `m`,
//! starting from `E_0 = 0`, `E_1 = 1`.
//!
//! For a prime modulus the period is available three ways: by direct
//! iteration ([`naive_period`]), as the order of the companion matrix
//! ([`matrix_order_period`]), and from the eigenvalues in the splitting
//! ring `F_p(sqrt(A^2 + 4B))` ([`eigenvalue_period`]). The [`theorems`]
//! module attaches the divisibility bounds `p - 1` and `2(p + 1) ord(B^2)`
//! and scans ranges of primes against them.
//!
//! ```
//! use pisano::{analyze, RecurrenceSpec};
//!
//! let report = analyze(&RecurrenceSpec::fibonacci(11).unwrap()).unwrap();
//! assert_eq!(report.period, 10);
//! assert!(report.tight);
//! ```

pub mod error;
pub mod modular;
pub mod quadratic_field;
pub mod recurrence;
pub mod theorems;

pub use error::{Error, Result};
pub use modular::{
    factorize, is_prime, legendre_symbol, mod_inv, mod_pow, mult_order, sqrt_mod, Factorization,
    PrimeModulus,
};
pub use quadratic_field::{
    eigenvalues, fp2_arith, fp2_order, fp2_pow, frobenius, FieldCtx, Fp2Element, Fp2Op,
    ResidueClass,
};
pub use recurrence::{
    analyze, analyze_with, eigenvalue_period, mat_pow, matrix_order_period, naive_period,
    period_composite, period_prime_power, sequence_slice, Mat2, Method, MethodResult, PeriodReport,
    RecurrenceSpec,
};
pub use theorems::{
    bound_for_prime, classify, discriminant, tightness_survey, verify_range, BoundResult,
    Classification, Theorem, TightnessRow, TightnessSurvey,
};
