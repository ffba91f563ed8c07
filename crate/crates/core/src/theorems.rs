//! Classification of primes by the discriminant, the divisibility bounds on
//! the period, and range scans that check them.
//!
//! | class | bound                    | theorem |
//! |-------|--------------------------|---------|
//! | split, Fibonacci | `p - 1`       | T2 |
//! | inert, Fibonacci | `2(p + 1)`    | T5 |
//! | split | `p - 1`                  | T6 |
//! | inert | `2(p + 1) ord(B^2)`      | T9 |
//!
//! Ramified primes, primes dividing `B`, and `p = 2` carry no bound.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{
    euler_criterion, factorize, mul_mod, primes_up_to, reduce, Factorization, PrimeModulus,
};
use crate::recurrence::{analyze_with, Method, PeriodReport, RecurrenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Split,
    Inert,
    Ramified,
    /// `p | B`: the companion matrix is singular.
    Degenerate,
    /// `p = 2`.
    SmallPrime,
    /// Not a prime modulus.
    Composite,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Split => "split",
            Classification::Inert => "inert",
            Classification::Ramified => "ramified",
            Classification::Degenerate => "degenerate",
            Classification::SmallPrime => "small_prime",
            Classification::Composite => "composite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T2,
    T5,
    T6,
    T9,
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T2 => "T2",
            Theorem::T5 => "T5",
            Theorem::T6 => "T6",
            Theorem::T9 => "T9",
            Theorem::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub p: u64,
    pub a: i64,
    pub b: i64,
    pub classification: Classification,
    pub bound: Option<u128>,
    pub theorem: Theorem,
}

/// `A^2 + 4B`.
pub fn discriminant(a: i64, b: i64) -> i128 {
    a as i128 * a as i128 + 4 * b as i128
}

/// Classifies the prime `p` for the recurrence `(A, B)`. `p` is assumed
/// prime.
pub fn classify(a: i64, b: i64, p: u64) -> Classification {
    if reduce(b as i128, p) == 0 {
        return Classification::Degenerate;
    }
    if p == 2 {
        return Classification::SmallPrime;
    }
    match euler_criterion(reduce(discriminant(a, b), p), p) {
        0 => Classification::Ramified,
        1 => Classification::Split,
        _ => Classification::Inert,
    }
}

/// The theorem bound for `(A, B)` modulo the prime `p`.
pub fn bound_for_prime(a: i64, b: i64, p: u64) -> Result<BoundResult> {
    PrimeModulus::new(p)?;
    let classification = classify(a, b, p);
    let (bound, theorem) = match bound_with_factors(a, b, p) {
        Some((n, _)) => (Some(n), theorem_for(a, b, classification)),
        None => (None, Theorem::None),
    };
    Ok(BoundResult {
        p,
        a,
        b,
        classification,
        bound,
        theorem,
    })
}

fn theorem_for(a: i64, b: i64, class: Classification) -> Theorem {
    let fib = a == 1 && b == 1;
    match (class, fib) {
        (Classification::Split, true) => Theorem::T2,
        (Classification::Inert, true) => Theorem::T5,
        (Classification::Split, false) => Theorem::T6,
        (Classification::Inert, false) => Theorem::T9,
        _ => Theorem::None,
    }
}

/// The bound together with its factorization, for split and inert primes.
pub(crate) fn bound_with_factors(a: i64, b: i64, p: u64) -> Option<(u128, Factorization)> {
    match classify(a, b, p) {
        Classification::Split => Some(((p - 1) as u128, factorize(p - 1))),
        Classification::Inert => {
            let pm = PrimeModulus::new(p).ok()?;
            let bm = reduce(b as i128, p);
            let ord = pm.order_of(mul_mod(bm, bm, p)).ok()?;
            let n = 2 * (p as u128 + 1) * ord as u128;
            let f = Factorization::from_pairs([(2, 1)])
                .merge(&factorize(p + 1))
                .merge(&factorize(ord));
            Some((n, f))
        }
        _ => None,
    }
}

/// Period reports for every odd prime `p <= p_max` with `p ∤ B`.
///
/// Split and inert primes are computed from the eigenvalues, independently
/// of the bound; ramified primes by iteration. Violations show up as
/// reports with [`PeriodReport::violates_bound`] set.
pub fn verify_range(a: i64, b: i64, p_max: u64) -> Result<Vec<PeriodReport>> {
    if p_max < 3 {
        return Err(Error::InvalidModulus {
            m: p_max,
            reason: "range must include an odd prime",
        });
    }
    let primes: Vec<u64> = primes_up_to(p_max)
        .into_iter()
        .filter(|&p| p != 2 && reduce(b as i128, p) != 0)
        .collect();
    primes
        .par_iter()
        .map(|&p| {
            let spec = RecurrenceSpec::new(a, b, p)?;
            let method = match classify(a, b, p) {
                Classification::Ramified => Method::Naive,
                _ => Method::Eigenvalue,
            };
            analyze_with(&spec, &[method])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub p: u64,
    pub period: u128,
    pub bound: u128,
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessSurvey {
    pub a: i64,
    pub b: i64,
    pub p_max: u64,
    pub rows: Vec<TightnessRow>,
    pub tight: usize,
    pub non_tight: usize,
}

impl TightnessSurvey {
    pub fn non_tight_primes(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| !r.tight).map(|r| r.p).collect()
    }

    pub fn tight_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.tight as f64 / self.rows.len() as f64
        }
    }
}

/// Period against bound for every prime in [`verify_range`] that has a
/// bound.
pub fn tightness_survey(a: i64, b: i64, p_max: u64) -> Result<TightnessSurvey> {
    let rows: Vec<TightnessRow> = verify_range(a, b, p_max)?
        .into_iter()
        .filter_map(|r| {
            r.bound.map(|bound| TightnessRow {
                p: r.spec.modulus(),
                period: r.period,
                bound,
                tight: r.tight,
            })
        })
        .collect();
    let tight = rows.iter().filter(|r| r.tight).count();
    Ok(TightnessSurvey {
        a,
        b,
        p_max,
        non_tight: rows.len() - tight,
        tight,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(1, 1), 5);
        assert_eq!(discriminant(3, 2), 17);
        assert_eq!(discriminant(1, 2), 9);
        assert_eq!(
            discriminant(i64::MIN, i64::MIN),
            (i64::MIN as i128).pow(2) + 4 * i64::MIN as i128
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1, 1, 11), Classification::Split);
        assert_eq!(classify(1, 1, 7), Classification::Inert);
        assert_eq!(classify(1, 1, 5), Classification::Ramified);
        assert_eq!(classify(1, 2, 3), Classification::Ramified);
        assert_eq!(classify(1, 1, 2), Classification::SmallPrime);
        assert_eq!(classify(1, 2, 2), Classification::Degenerate);
        assert_eq!(classify(3, 14, 7), Classification::Degenerate);
    }

    #[test]
    fn bound_examples() {
        let r = bound_for_prime(3, 2, 13).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(12), Theorem::T6));
        let r = bound_for_prime(3, 2, 7).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(48), Theorem::T9));
        let r = bound_for_prime(3, 2, 37).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(1368), Theorem::T9));
        let r = bound_for_prime(3, 1, 11).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(24), Theorem::T9));
        let r = bound_for_prime(3, 1, 19).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(40), Theorem::T9));
        let r = bound_for_prime(1, 1, 11).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(10), Theorem::T2));
        let r = bound_for_prime(1, 1, 7).unwrap();
        assert_eq!((r.bound, r.theorem), (Some(16), Theorem::T5));
        for (a, b, p, class) in [
            (1, 1, 5, Classification::Ramified),
            (1, 1, 2, Classification::SmallPrime),
            (1, 7, 7, Classification::Degenerate),
        ] {
            let r = bound_for_prime(a, b, p).unwrap();
            assert_eq!(
                (r.classification, r.bound, r.theorem),
                (class, None, Theorem::None)
            );
        }
        assert!(bound_for_prime(1, 1, 15).is_err());
    }

    #[test]
    fn verify_fibonacci_below_100() {
        let reports = verify_range(1, 1, 100).unwrap();
        let bounded: Vec<_> = reports.iter().filter(|r| r.bound.is_some()).collect();
        assert_eq!(bounded.len(), 23);
        assert_eq!(reports.len(), 24);
        assert!(reports.iter().all(|r| !r.violates_bound()));
        let loose: Vec<u64> = bounded
            .iter()
            .filter(|r| !r.tight)
            .map(|r| r.spec.modulus())
            .collect();
        assert_eq!(loose, vec![29, 47, 89]);
    }

    #[test]
    fn verify_one_two_is_split_except_three() {
        for r in verify_range(1, 2, 100).unwrap() {
            let p = r.spec.modulus();
            if p == 3 {
                assert_eq!(r.classification, Classification::Ramified);
            } else {
                assert_eq!(r.classification, Classification::Split);
                assert_eq!(r.bound, Some(p as u128 - 1));
                assert!(r.divides_bound);
            }
        }
    }

    #[test]
    fn verify_single_prime_three() {
        let reports = verify_range(1, 1, 3).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert_eq!(r.classification, Classification::Inert);
        assert_eq!(r.period, 8);
        assert_eq!(r.bound, Some(8));
        assert!(r.tight);
        assert!(verify_range(1, 1, 2).is_err());
    }

    #[test]
    fn survey_rows() {
        let s = tightness_survey(1, 1, 100).unwrap();
        assert_eq!(s.non_tight_primes(), vec![29, 47, 89]);
        assert_eq!(s.tight + s.non_tight, s.rows.len());
        let row11 = s.rows.iter().find(|r| r.p == 11).unwrap();
        assert_eq!(
            *row11,
            TightnessRow {
                p: 11,
                period: 10,
                bound: 10,
                tight: true
            }
        );
        assert!(s.rows.iter().all(|r| r.p != 5));

        let s = tightness_survey(3, 2, 37).unwrap();
        let row = s.rows.iter().find(|r| r.p == 37).unwrap();
        assert_eq!(
            *row,
            TightnessRow {
                p: 37,
                period: 1368,
                bound: 1368,
                tight: true
            }
        );
    }
}
