//! Exact arithmetic in `Z/mZ` for 64-bit moduli.
//!
//! Products are formed in `u128`, so every routine is exact for any modulus
//! that fits in a `u64`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// `base^exp mod m` by square-and-multiply. `0^0` is 1.
pub fn mod_pow(base: u64, exp: u64, m: u64) -> u64 {
    mod_pow_wide(base, exp as u128, m)
}

/// [`mod_pow`] with a 128-bit exponent.
pub fn mod_pow_wide(base: u64, mut exp: u128, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow)
}

pub fn gcd_wide(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm_wide(a: u128, b: u128) -> Result<u128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd_wide(a, b)).checked_mul(b).ok_or(Error::Overflow)
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inv(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidModulus {
            m,
            reason: "modulus must be at least 2",
        });
    }
    let a = a % m;
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(reduce(old_s, m))
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= limit`, by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

/// Euler's criterion: `a^((p-1)/2) mod p` mapped to `-1`, `0` or `+1`.
pub fn legendre_symbol(a: i128, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidModulus {
            m: p,
            reason: "Legendre symbol needs an odd prime",
        });
    }
    Ok(euler_criterion(reduce(a, p), p))
}

/// Unchecked Euler criterion for an odd prime `p` and a reduced residue.
pub(crate) fn euler_criterion(a: u64, p: u64) -> i8 {
    match mod_pow(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Square root of `a` modulo an odd prime `p` by Tonelli-Shanks.
///
/// Returns the smaller of the two roots `r` and `p - r`.
pub fn sqrt_mod(a: u64, p: u64) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidModulus {
            m: p,
            reason: "square roots are taken modulo an odd prime",
        });
    }
    let a = a % p;
    if a == 0 {
        return Ok(0);
    }
    if euler_criterion(a, p) != 1 {
        return Err(Error::NoRoot { a, p });
    }
    let r = if p % 4 == 3 {
        mod_pow(a, (p + 1) / 4, p)
    } else {
        tonelli_shanks(a, p)
    };
    Ok(r.min(p - r))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // Smallest non-residue keeps the root deterministic.
    let z = (2..p).find(|&z| euler_criterion(z, p) == -1).unwrap();
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = mod_pow(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Prime factorization as sorted `(prime, exponent)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from arbitrary `(prime, exponent)` pairs,
    /// merging repeats and dropping zero exponents.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Self {
        let mut v: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(v.len());
        for (q, e) in v {
            match out.last_mut() {
                Some((lq, le)) if *lq == q => *le += e,
                _ => out.push((q, e)),
            }
        }
        Factorization(out)
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(q, _)| q)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// The factored number, or `None` if it exceeds `u128`.
    pub fn value(&self) -> Option<u128> {
        self.0.iter().try_fold(1u128, |acc, &(q, e)| {
            (q as u128)
                .checked_pow(e)
                .and_then(|pe| acc.checked_mul(pe))
        })
    }

    /// Factorization of the product of `self` and `other`.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        Factorization::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (q, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if *e == 1 {
                write!(f, "{q}")?;
            } else {
                write!(f, "{q}^{e}")?;
            }
        }
        Ok(())
    }
}

const TRIAL_LIMIT: u64 = 1 << 10;

/// Complete factorization of `n`: trial division by small primes, then
/// Miller-Rabin and Pollard-Brent rho on the cofactor. `factorize(0)` and
/// `factorize(1)` are the empty product.
pub fn factorize(mut n: u64) -> Factorization {
    let mut pairs = Vec::new();
    if n < 2 {
        return Factorization::one();
    }
    let tz = n.trailing_zeros();
    if tz > 0 {
        pairs.push((2, tz));
        n >>= tz;
    }
    let mut d = 3;
    while d < TRIAL_LIMIT && d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            pairs.push((d, e));
        }
        d += 2;
    }
    if n > 1 {
        if n < TRIAL_LIMIT * TRIAL_LIMIT {
            pairs.push((n, 1));
        } else {
            split_large(n, &mut pairs);
        }
    }
    Factorization::from_pairs(pairs)
}

fn split_large(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Finds a nontrivial factor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    const BATCH: u64 = 128;
    for c in 1..n {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        let mut g = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard_brent called on a prime")
}

/// Minimal `t` dividing `multiple` with `is_identity(t)`.
///
/// `factors` must factor `multiple`, and `is_identity(multiple)` must hold.
/// Each prime is divided out while the quotient still annihilates.
pub fn peel_order<F>(multiple: u128, factors: &Factorization, mut is_identity: F) -> u128
where
    F: FnMut(u128) -> bool,
{
    let mut order = multiple;
    for &(q, e) in factors.pairs() {
        let q = q as u128;
        for _ in 0..e {
            if !order.is_multiple_of(q) {
                break;
            }
            let candidate = order / q;
            if is_identity(candidate) {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// A validated prime modulus, carrying the factorization of `p - 1` once
/// it has been needed.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    p: u64,
    group_order: OnceLock<Factorization>,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModulus {
                m: p,
                reason: "not prime",
            });
        }
        Ok(Self {
            p,
            group_order: OnceLock::new(),
        })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.p
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Factorization of `p - 1`, the order of `F_p^*`.
    pub fn group_order_factors(&self) -> &Factorization {
        self.group_order.get_or_init(|| factorize(self.p - 1))
    }

    /// Factorization of `p^2 - 1 = (p - 1)(p + 1)`.
    pub fn extension_order_factors(&self) -> Factorization {
        let plus = match self.p.checked_add(1) {
            Some(v) => factorize(v),
            None => Factorization::from_pairs([(2, 64)]),
        };
        self.group_order_factors().merge(&plus)
    }

    /// Multiplicative order of `a` in `F_p^*`.
    pub fn order_of(&self, a: u64) -> Result<u64> {
        let p = self.p;
        let a = a % p;
        if a == 0 {
            return Err(Error::NotInvertible { a, m: p });
        }
        let t = peel_order((p - 1) as u128, self.group_order_factors(), |t| {
            mod_pow_wide(a, t, p) == 1
        });
        Ok(t as u64)
    }
}

impl PartialEq for PrimeModulus {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeModulus {}

/// Multiplicative order of `a` modulo the prime `p`.
pub fn mult_order(a: u64, p: u64) -> Result<u64> {
    PrimeModulus::new(p)?.order_of(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pow(b: u64, e: u64, m: u64) -> u64 {
        let mut acc = 1 % m;
        for _ in 0..e {
            acc = acc * b % m;
        }
        acc
    }

    fn brute_order(a: u64, p: u64) -> u64 {
        let mut x = a % p;
        let mut t = 1;
        while x != 1 {
            x = x * a % p;
            t += 1;
        }
        t
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(brute_pow(2, 36, 37), 1);
        assert_eq!(mod_pow(2, 36, 37), 1);
        assert_eq!(mod_pow(4, 3, 7), 1);
        for m in [2, 7, 37, 1000] {
            for x in 0..m.min(20) {
                assert_eq!(mod_pow(x, 0, m), 1);
            }
        }
        assert_eq!(mod_pow(0, 0, 5), 1);
        assert_eq!(mod_pow(0, 3, 5), 0);
    }

    #[test]
    fn mod_pow_matches_brute_force() {
        for m in 2..60 {
            for b in 0..m {
                for e in 0..15 {
                    assert_eq!(mod_pow(b, e, m), brute_pow(b, e, m));
                }
            }
        }
    }

    #[test]
    fn mod_pow_large_modulus() {
        let p = 18_446_744_073_709_551_557; // largest 64-bit prime
        assert_eq!(mod_pow(3, p - 1, p), 1);
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!((1..11).find(|b| 2 * b % 11 == 1), Some(6));
        assert_eq!(mod_inv(2, 11), Ok(6));
        for m in 2..50 {
            assert_eq!(mod_inv(1, m), Ok(1 % m));
        }
        assert_eq!(mod_inv(2, 4), Err(Error::NotInvertible { a: 2, m: 4 }));
        assert!(mod_inv(0, 7).is_err());
    }

    #[test]
    fn mod_inv_is_inverse() {
        for m in 2..200u64 {
            for a in 1..m {
                match mod_inv(a, m) {
                    Ok(b) => assert_eq!(a * b % m, 1),
                    Err(_) => assert_ne!(gcd(a, m), 1),
                }
            }
        }
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(100_000);
        let mut it = sieve.iter().peekable();
        for n in 0..=100_000u64 {
            let expected = it.peek() == Some(&&n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n), expected, "n = {n}");
        }
    }

    #[test]
    fn primality_large() {
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(18_446_744_073_709_551_615));
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(4_294_967_291));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(5, 11), Ok(1));
        assert_eq!(legendre_symbol(13, 19), Ok(-1));
        assert_eq!(legendre_symbol(17, 13), Ok(1));
        assert_eq!(legendre_symbol(17, 7), Ok(-1));
        assert_eq!(legendre_symbol(0, 7), Ok(0));
        assert_eq!(legendre_symbol(14, 7), Ok(0));
        assert_eq!(legendre_symbol(-1, 7), Ok(-1));
        assert!(legendre_symbol(5, 2).is_err());
        assert!(legendre_symbol(5, 9).is_err());
    }

    #[test]
    fn five_is_square_by_residue_class() {
        for p in primes_up_to(10_000)
            .into_iter()
            .filter(|&p| p > 2 && p != 5)
        {
            let qr = legendre_symbol(5, p).unwrap() == 1;
            assert_eq!(qr, matches!(p % 5, 1 | 4), "p = {p}");
        }
    }

    #[test]
    fn sqrt_examples() {
        let brute: Vec<u64> = (0..11).filter(|r| r * r % 11 == 5).collect();
        assert_eq!(brute, vec![4, 7]);
        assert_eq!(sqrt_mod(5, 11), Ok(4));
        assert_eq!(sqrt_mod(0, 13), Ok(0));
        assert_eq!(sqrt_mod(5, 7), Err(Error::NoRoot { a: 5, p: 7 }));
        assert!(sqrt_mod(1, 2).is_err());
    }

    #[test]
    fn sqrt_exhaustive_small_primes() {
        for p in primes_up_to(400).into_iter().skip(1) {
            for a in 0..p {
                let brute = (0..p).find(|r| r * r % p == a);
                match sqrt_mod(a, p) {
                    Ok(r) => {
                        assert_eq!(r * r % p, a);
                        assert!(r <= p - r || r == 0);
                        assert_eq!(Some(r), brute);
                    }
                    Err(Error::NoRoot { .. }) => assert!(brute.is_none()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn sqrt_large_prime_with_deep_two_adicity() {
        // p - 1 is divisible by 2^32
        let p = 0xffff_ffff_0000_0001u64;
        assert!(is_prime(p));
        for a in [2u64, 3, 5, 7, 123_456_789] {
            let sq = mul_mod(a, a, p);
            let r = sqrt_mod(sq, p).unwrap();
            assert_eq!(mul_mod(r, r, p), sq);
            assert_eq!(r, a.min(p - a));
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(36).pairs(), &[(2, 2), (3, 2)]);
        assert!(factorize(1).is_one());
        assert_eq!(38u64 * 36, 1368);
        assert_eq!(8u64 * 9 * 19, 1368);
        assert_eq!(factorize(1368).pairs(), &[(2, 3), (3, 2), (19, 1)]);
    }

    #[test]
    fn factorize_hard_semiprimes() {
        let f = factorize(1_470_626_929_934_143_021);
        assert_eq!(f.pairs(), &[(1_206_429_347, 1), (1_218_991_343, 1)]);
        let f = factorize(4_294_967_291 * 4_294_967_279);
        assert_eq!(f.pairs(), &[(4_294_967_279, 1), (4_294_967_291, 1)]);
        let f = factorize(u64::MAX);
        assert_eq!(f.value(), Some(u64::MAX as u128));
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn factorization_merge() {
        let a = factorize(36);
        let b = factorize(38);
        assert_eq!(a.merge(&b), factorize(1368));
        assert_eq!(a.merge(&b).to_string(), "2^3 * 3^2 * 19");
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(4, 7), Ok(3));
        for p in [2, 3, 7, 37, 1009] {
            assert_eq!(mult_order(1, p), Ok(1));
        }
        assert_eq!(brute_order(4, 37), 18);
        assert_eq!(mult_order(4, 37), Ok(18));
        assert_eq!(mult_order(0, 7), Err(Error::NotInvertible { a: 0, m: 7 }));
        assert_eq!(mult_order(14, 7), Err(Error::NotInvertible { a: 0, m: 7 }));
        assert!(mult_order(2, 9).is_err());
    }

    #[test]
    fn mult_order_matches_brute_force() {
        for p in primes_up_to(300) {
            let pm = PrimeModulus::new(p).unwrap();
            for a in 1..p {
                assert_eq!(pm.order_of(a).unwrap(), brute_order(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn prime_modulus_factors() {
        let pm = PrimeModulus::new(37).unwrap();
        assert_eq!(pm.group_order_factors().value(), Some(36));
        assert_eq!(pm.extension_order_factors().value(), Some(1368));
        assert!(PrimeModulus::new(1).is_err());
        assert!(PrimeModulus::new(91).is_err());
        let big = PrimeModulus::new(18_446_744_073_709_551_557).unwrap();
        assert_eq!(
            big.extension_order_factors().value(),
            Some(18_446_744_073_709_551_557u128 * 18_446_744_073_709_551_557 - 1)
        );
    }
}
