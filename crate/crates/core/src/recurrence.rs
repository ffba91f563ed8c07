//! Second-order recurrences `E_{n+1} = A E_n + B E_{n-1}` with `E_0 = 0`,
//! `E_1 = 1`, their companion matrix, and the period algorithms.
//!
//! The period is the least `k >= 1` with `(E_k, E_{k+1}) = (0, 1)`. It is
//! computed three independent ways for prime moduli: by stepping the
//! sequence, as the multiplicative order of the companion matrix, and from
//! the orders of its eigenvalues in the splitting ring. Prime powers and
//! composite moduli are assembled from the prime case.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{
    add_mod, factorize, gcd, is_prime, lcm_wide, mul_mod, peel_order, reduce, Factorization,
    PrimeModulus,
};
use crate::quadratic_field::{eigenvalues, ResidueClass};
use crate::theorems::{bound_for_prime, bound_with_factors, classify, Classification, Theorem};

/// Moduli up to this size are also cross-checked by direct iteration in
/// [`analyze`].
pub const NAIVE_CROSSCHECK_LIMIT: u64 = 1 << 12;

/// Coefficients `(A, B)` and modulus `m` of a recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SpecRepr", try_from = "SpecRepr")]
pub struct RecurrenceSpec {
    a: i64,
    b: i64,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    a: i64,
    b: i64,
    m: u64,
    delta: u64,
}

impl From<RecurrenceSpec> for SpecRepr {
    fn from(s: RecurrenceSpec) -> Self {
        SpecRepr {
            a: s.a,
            b: s.b,
            m: s.m,
            delta: s.delta_mod(),
        }
    }
}

impl TryFrom<SpecRepr> for RecurrenceSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = RecurrenceSpec::new(r.a, r.b, r.m)?;
        if spec.delta_mod() != r.delta {
            return Err(Error::InvalidModulus {
                m: r.m,
                reason: "delta does not match a^2 + 4b",
            });
        }
        Ok(spec)
    }
}

impl RecurrenceSpec {
    pub fn new(a: i64, b: i64, m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidModulus {
                m,
                reason: "modulus must be at least 2",
            });
        }
        Ok(Self { a, b, m })
    }

    /// `F_{n+1} = F_n + F_{n-1}`.
    pub fn fibonacci(m: u64) -> Result<Self> {
        Self::new(1, 1, m)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn a_mod(&self) -> u64 {
        reduce(self.a as i128, self.m)
    }

    pub fn b_mod(&self) -> u64 {
        reduce(self.b as i128, self.m)
    }

    /// `A^2 + 4B` over the integers.
    pub fn delta(&self) -> i128 {
        crate::theorems::discriminant(self.a, self.b)
    }

    pub fn delta_mod(&self) -> u64 {
        reduce(self.delta(), self.m)
    }

    pub fn is_fibonacci(&self) -> bool {
        self.a == 1 && self.b == 1
    }

    /// The same coefficients over another modulus.
    pub fn with_modulus(&self, m: u64) -> Result<Self> {
        Self::new(self.a, self.b, m)
    }

    /// `gcd(B, m) = 1`, i.e. the companion matrix is invertible.
    pub fn is_purely_periodic(&self) -> bool {
        gcd(self.b_mod(), self.m) == 1
    }

    fn require_periodic(&self) -> Result<()> {
        if self.is_purely_periodic() {
            Ok(())
        } else {
            Err(Error::NotPurelyPeriodic {
                b: self.b,
                m: self.m,
            })
        }
    }

    /// `U = [[A, B], [1, 0]]`.
    pub fn companion(&self) -> Mat2 {
        Mat2::new([[self.a_mod(), self.b_mod()], [1 % self.m, 0]])
    }
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "E(n+1) = {}*E(n) + {}*E(n-1) mod {}",
            self.a, self.b, self.m
        )
    }
}

/// A 2x2 matrix of residues. The modulus is supplied per operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2(pub [[u64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn new(rows: [[u64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn reduced(&self, m: u64) -> Self {
        let r = self.0;
        Mat2([[r[0][0] % m, r[0][1] % m], [r[1][0] % m, r[1][1] % m]])
    }

    pub fn mul_mod(&self, rhs: &Mat2, m: u64) -> Mat2 {
        let (l, r) = (self.0, rhs.0);
        let dot = |i: usize, j: usize| {
            add_mod(
                mul_mod(l[i][0], r[0][j], m),
                mul_mod(l[i][1], r[1][j], m),
                m,
            )
        };
        Mat2([[dot(0, 0), dot(0, 1)], [dot(1, 0), dot(1, 1)]])
    }

    /// `self^e mod m`; the empty power is the identity.
    pub fn pow_mod(&self, mut e: u128, m: u64) -> Mat2 {
        let mut base = self.reduced(m);
        let mut acc = Self::IDENTITY.reduced(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            e >>= 1;
        }
        acc
    }
}

pub fn mat_pow(mat: &Mat2, e: u128, m: u64) -> Mat2 {
    mat.pow_mod(e, m)
}

/// `E_0, ..., E_{count-1}` reduced modulo `m`.
pub fn sequence_slice(spec: &RecurrenceSpec, count: usize) -> Vec<u64> {
    let (a, b, m) = (spec.a_mod(), spec.b_mod(), spec.m);
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (0u64, 1 % m);
    for _ in 0..count {
        out.push(prev);
        let next = add_mod(mul_mod(a, cur, m), mul_mod(b, prev, m), m);
        (prev, cur) = (cur, next);
    }
    out
}

/// Period by stepping the pair `(E_i, E_{i+1})` until it returns to `(0, 1)`.
///
/// The pair `(0, 0)` never occurs, so the walk is bounded by `m^2 - 1`
/// steps; reaching `m^2` is reported as [`Error::CapExceeded`].
pub fn naive_period(spec: &RecurrenceSpec) -> Result<u128> {
    spec.require_periodic()?;
    let (a, b, m) = (spec.a_mod(), spec.b_mod(), spec.m);
    let cap = (m as u128) * (m as u128);
    if m <= SMALL_MODULUS {
        // a*x + b*y < 2^32: Lemire's multiply-shift remainder replaces division.
        let magic = u64::MAX / m + 1;
        let step = |prev: u64, cur: u64| {
            let n = a * cur + b * prev;
            ((magic.wrapping_mul(n) as u128 * m as u128) >> 64) as u64
        };
        return walk_to_start(step, cap, m);
    }
    if m < 1 << 31 {
        // a*x + b*y < 2^63, so one reduction per step suffices.
        return walk_to_start(|prev, cur| (a * cur + b * prev) % m, cap, m);
    }
    walk_to_start(
        |prev, cur| add_mod(mul_mod(a, cur, m), mul_mod(b, prev, m), m),
        cap,
        m,
    )
}

/// Largest modulus with `2 (m - 1)^2 < 2^32`.
const SMALL_MODULUS: u64 = 46_341;

#[inline(always)]
fn walk_to_start<F: Fn(u64, u64) -> u64>(step: F, cap: u128, m: u64) -> Result<u128> {
    let (mut prev, mut cur) = (0u64, 1u64);
    let mut i = 0u128;
    loop {
        let next = step(prev, cur);
        prev = cur;
        cur = next;
        i += 1;
        if prev == 0 && cur == 1 {
            return Ok(i);
        }
        if i >= cap {
            return Err(Error::CapExceeded { m });
        }
    }
}

fn prime_of(spec: &RecurrenceSpec) -> Result<PrimeModulus> {
    PrimeModulus::new(spec.m)
}

/// Order of the companion matrix `U` modulo a prime.
///
/// Starts from a multiple `N` with `U^N = I`: the theorem bound when the
/// characteristic polynomial has distinct roots, `p(p^2 - 1)` otherwise.
/// Primes are then peeled off `N` while the power stays the identity.
pub fn matrix_order_period(spec: &RecurrenceSpec) -> Result<u128> {
    let pm = prime_of(spec)?;
    spec.require_periodic()?;
    let p = pm.get();
    let (multiple, factors) = match bound_with_factors(spec.a, spec.b, p) {
        Some(bf) => bf,
        None => {
            let n = (p as u128)
                .checked_mul((p as u128) * (p as u128) - 1)
                .ok_or(Error::Overflow)?;
            let f = pm
                .extension_order_factors()
                .merge(&Factorization::from_pairs([(p, 1)]));
            (n, f)
        }
    };
    order_of_companion(spec, multiple, &factors)
}

fn order_of_companion(
    spec: &RecurrenceSpec,
    multiple: u128,
    factors: &Factorization,
) -> Result<u128> {
    let m = spec.m;
    let u = spec.companion();
    if !u.pow_mod(multiple, m).is_identity() {
        return Err(Error::BoundViolation {
            candidate: multiple,
            m,
        });
    }
    Ok(peel_order(multiple, factors, |t| {
        u.pow_mod(t, m).is_identity()
    }))
}

/// Period from the eigenvalues of `U` over an odd prime.
///
/// Distinct roots: `lcm(ord(lambda), ord(lambda_bar))`. A repeated root
/// `lambda` gives a Jordan block whose order is `p * ord(lambda)`.
pub fn eigenvalue_period(spec: &RecurrenceSpec) -> Result<u128> {
    let pm = prime_of(spec)?;
    if !pm.is_odd() {
        return Err(Error::WrongModulus { m: 2 });
    }
    spec.require_periodic()?;
    let p = pm.get();
    let (lambda, lambda_bar) = eigenvalues(spec.a, spec.b, p)?;
    match lambda.ctx().residue_class() {
        ResidueClass::Split | ResidueClass::Inert => lcm_wide(lambda.order()?, lambda_bar.order()?),
        ResidueClass::Ramified => {
            let ord = pm.order_of(lambda.x())?;
            Ok(p as u128 * ord as u128)
        }
    }
}

/// `(p, t)` with `m = p^t`, if `m` is a prime power.
pub fn prime_power_parts(m: u64) -> Option<(u64, u32)> {
    match factorize(m).pairs() {
        [(p, t)] => Some((*p, *t)),
        _ => None,
    }
}

/// Period modulo `p^t`, from the candidate `p^(t-1) k(p)`.
pub fn period_prime_power(spec: &RecurrenceSpec) -> Result<u128> {
    let (p, t) = prime_power_parts(spec.m).ok_or(Error::NotPrimePower { m: spec.m })?;
    spec.require_periodic()?;
    let base = spec.with_modulus(p)?;
    let k_p = matrix_order_period(&base)?;
    if t == 1 {
        return Ok(k_p);
    }
    let k_p64 = u64::try_from(k_p).map_err(|_| Error::Overflow)?;
    let lift = (p as u128).pow(t - 1);
    let multiple = lift.checked_mul(k_p).ok_or(Error::Overflow)?;
    let factors = factorize(k_p64).merge(&Factorization::from_pairs([(p, t - 1)]));
    order_of_companion(spec, multiple, &factors)
}

/// Period for any modulus: the lcm of the periods modulo each prime power.
pub fn period_composite(spec: &RecurrenceSpec) -> Result<u128> {
    spec.require_periodic()?;
    factorize(spec.m)
        .pairs()
        .iter()
        .try_fold(1u128, |acc, &(p, t)| {
            let part = spec.with_modulus(p.pow(t))?;
            lcm_wide(acc, period_prime_power(&part)?)
        })
}

/// The period algorithms available to [`analyze_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Naive,
    MatrixOrder,
    Eigenvalue,
    PrimePower,
    Composite,
}

impl Method {
    pub fn run(self, spec: &RecurrenceSpec) -> Result<u128> {
        match self {
            Method::Naive => naive_period(spec),
            Method::MatrixOrder => matrix_order_period(spec),
            Method::Eigenvalue => eigenvalue_period(spec),
            Method::PrimePower => period_prime_power(spec),
            Method::Composite => period_composite(spec),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::MatrixOrder => "matrix_order",
            Method::Eigenvalue => "eigenvalue",
            Method::PrimePower => "prime_power",
            Method::Composite => "composite",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub period: u128,
}

/// The outcome of a period computation together with the applicable
/// theorem bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub spec: RecurrenceSpec,
    pub period: u128,
    pub method_agreement: Vec<MethodResult>,
    pub classification: Classification,
    pub bound: Option<u128>,
    pub theorem: Theorem,
    pub divides_bound: bool,
    pub tight: bool,
}

impl PeriodReport {
    /// A bound applies and the period does not divide it.
    pub fn violates_bound(&self) -> bool {
        self.bound.is_some() && !self.divides_bound
    }
}

/// Methods [`analyze`] runs by default for a modulus.
pub fn default_methods(spec: &RecurrenceSpec) -> Vec<Method> {
    let m = spec.m;
    let mut methods = Vec::new();
    if is_prime(m) {
        methods.push(Method::MatrixOrder);
        if m != 2 {
            methods.push(Method::Eigenvalue);
        }
        let needs_iteration = m == 2
            || classify(spec.a, spec.b, m) == Classification::Ramified
            || m <= NAIVE_CROSSCHECK_LIMIT;
        if needs_iteration {
            methods.push(Method::Naive);
        }
    } else {
        if prime_power_parts(m).is_some() {
            methods.push(Method::PrimePower);
        }
        methods.push(Method::Composite);
        if m <= NAIVE_CROSSCHECK_LIMIT {
            methods.push(Method::Naive);
        }
    }
    methods
}

/// Period report using [`default_methods`].
pub fn analyze(spec: &RecurrenceSpec) -> Result<PeriodReport> {
    analyze_with(spec, &default_methods(spec))
}

/// Runs every listed method, requires them to agree, and attaches the
/// classification and theorem bound.
pub fn analyze_with(spec: &RecurrenceSpec, methods: &[Method]) -> Result<PeriodReport> {
    spec.require_periodic()?;
    let m = spec.m;
    let results = methods
        .iter()
        .map(|&method| {
            method
                .run(spec)
                .map(|period| MethodResult { method, period })
        })
        .collect::<Result<Vec<_>>>()?;
    let period = match results.first() {
        Some(r) => r.period,
        None => naive_period(spec)?,
    };
    if let Some(bad) = results.iter().find(|r| r.period != period) {
        return Err(Error::MethodDisagreement {
            m,
            detail: format!(
                "{} gives {}, {} gives {}",
                results[0].method, period, bad.method, bad.period
            ),
        });
    }
    let (classification, bound, theorem) = if is_prime(m) {
        let br = bound_for_prime(spec.a, spec.b, m)?;
        (br.classification, br.bound, br.theorem)
    } else {
        (Classification::Composite, None, Theorem::None)
    };
    let divides_bound = bound.is_some_and(|n| n % period == 0);
    let tight = bound == Some(period);
    Ok(PeriodReport {
        spec: *spec,
        period,
        method_agreement: results,
        classification,
        bound,
        theorem,
        divides_bound,
        tight,
    })
}
