//! Arithmetic in `F_p(sqrt(delta))`, the splitting ring of `x^2 - A x - B`.
//!
//! Elements are pairs `(x, y)` standing for `x + y * sqrt(delta)` with the
//! relation `sqrt(delta)^2 = delta`. When `delta` is a non-residue this is
//! the field `F_{p^2}`. When `delta` is a nonzero square the same formulas
//! describe `F_p x F_p`, and an element is read back into `F_p` by
//! substituting the canonical square root. When `p | delta` the ring has
//! the nilpotent `sqrt(delta)` and is not a field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{
    add_mod, euler_criterion, factorize, mod_inv, mul_mod, peel_order, reduce, sqrt_mod, sub_mod,
    PrimeModulus,
};

/// How `x^2 - delta` factors over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueClass {
    /// `delta` is a nonzero square: two distinct roots in `F_p`.
    Split,
    /// `delta` is a non-residue: the roots live in `F_{p^2}`.
    Inert,
    /// `p | delta`: a repeated root.
    Ramified,
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidueClass::Split => "split",
            ResidueClass::Inert => "inert",
            ResidueClass::Ramified => "ramified",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u64,
    delta: u64,
    class: ResidueClass,
    /// Canonical `sqrt_mod(delta, p)` in split and ramified contexts.
    root: Option<u64>,
}

impl FieldCtx {
    /// Context for `F_p(sqrt(delta))`; `delta` may be any integer.
    pub fn new(p: u64, delta: i128) -> Result<Self> {
        if p == 2 {
            return Err(Error::WrongModulus { m: p });
        }
        PrimeModulus::new(p)?;
        Ok(Self::new_unchecked(p, reduce(delta, p)))
    }

    pub(crate) fn new_unchecked(p: u64, delta: u64) -> Self {
        let (class, root) = match euler_criterion(delta, p) {
            0 => (ResidueClass::Ramified, Some(0)),
            1 => (ResidueClass::Split, sqrt_mod(delta, p).ok()),
            _ => (ResidueClass::Inert, None),
        };
        Self {
            p,
            delta,
            class,
            root,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn residue_class(&self) -> ResidueClass {
        self.class
    }

    pub fn is_field(&self) -> bool {
        self.class == ResidueClass::Inert
    }

    /// The canonical square root of `delta` in `F_p`, if it exists.
    pub fn sqrt_delta(&self) -> Option<u64> {
        self.root
    }

    pub fn zero(&self) -> Fp2Element {
        Fp2Element::new(*self, 0, 0)
    }

    pub fn one(&self) -> Fp2Element {
        Fp2Element::new(*self, 1, 0)
    }

    /// The element `sqrt(delta)`, i.e. `(0, 1)`.
    pub fn sqrt_delta_element(&self) -> Fp2Element {
        Fp2Element::new(*self, 0, 1)
    }

    /// Embeds a residue of `F_p`.
    pub fn scalar(&self, x: u64) -> Fp2Element {
        Fp2Element::new(*self, x, 0)
    }

    pub fn element(&self, x: u64, y: u64) -> Fp2Element {
        Fp2Element::new(*self, x, y)
    }
}

/// `x + y * sqrt(delta)` with both coordinates reduced modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2Element {
    ctx: FieldCtx,
    x: u64,
    y: u64,
}

impl Fp2Element {
    fn new(ctx: FieldCtx, x: u64, y: u64) -> Self {
        Self {
            ctx,
            x: x % ctx.p,
            y: y % ctx.p,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.x, self.y)
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_one(&self) -> bool {
        self.x == 1 && self.y == 0
    }

    /// True when the element lies in the prime subfield.
    pub fn in_base_field(&self) -> bool {
        self.y == 0
    }

    /// `x^2 - delta * y^2`, the product of the element with its conjugate.
    pub fn norm(&self) -> u64 {
        let p = self.ctx.p;
        sub_mod(
            mul_mod(self.x, self.x, p),
            mul_mod(self.ctx.delta, mul_mod(self.y, self.y, p), p),
            p,
        )
    }

    /// `x - y * sqrt(delta)`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.ctx, self.x, sub_mod(0, self.y, self.ctx.p))
    }

    /// Value in `F_p` after substituting the canonical root of `delta`.
    /// `None` in inert contexts.
    pub fn embed(&self) -> Option<u64> {
        let p = self.ctx.p;
        self.ctx
            .root
            .map(|r| add_mod(self.x, mul_mod(self.y, r, p), p))
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        let p = self.ctx.p;
        Ok(Self::new(
            self.ctx,
            add_mod(self.x, rhs.x, p),
            add_mod(self.y, rhs.y, p),
        ))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        let p = self.ctx.p;
        Ok(Self::new(
            self.ctx,
            sub_mod(self.x, rhs.x, p),
            sub_mod(self.y, rhs.y, p),
        ))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_ctx(rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let p = self.ctx.p;
        let yy = mul_mod(self.y, rhs.y, p);
        let x = add_mod(mul_mod(self.x, rhs.x, p), mul_mod(self.ctx.delta, yy, p), p);
        let y = add_mod(mul_mod(self.x, rhs.y, p), mul_mod(self.y, rhs.x, p), p);
        Self::new(self.ctx, x, y)
    }

    /// `(x - y sqrt(delta)) / (x^2 - delta y^2)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        let p = self.ctx.p;
        let n = self.norm();
        if n == 0 {
            return Err(Error::NormZero);
        }
        let n_inv = mod_inv(n, p)?;
        let c = self.conjugate();
        Ok(Self::new(
            self.ctx,
            mul_mod(c.x, n_inv, p),
            mul_mod(c.y, n_inv, p),
        ))
    }

    /// `self^e` by square-and-multiply; `e = 0` gives one.
    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// The Frobenius map `u -> u^p`, which on `F_{p^2}` is conjugation.
    pub fn frobenius(&self) -> Result<Self> {
        if !self.ctx.is_field() {
            return Err(Error::WrongContext);
        }
        Ok(self.conjugate())
    }

    /// Multiplicative order, found by peeling primes off a known multiple:
    /// `p^2 - 1` for split and inert contexts, `p(p - 1)` when ramified.
    pub fn order(&self) -> Result<u128> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        if self.norm() == 0 {
            return Err(Error::NormZero);
        }
        let p = self.ctx.p;
        let (multiple, factors) = match self.ctx.class {
            ResidueClass::Ramified => {
                let f = factorize(p - 1).merge(&factorize(p));
                ((p as u128) * (p as u128 - 1), f)
            }
            _ => {
                let f = factorize(p - 1).merge(&factorize(p + 1));
                ((p as u128) * (p as u128) - 1, f)
            }
        };
        debug_assert!(self.pow(multiple).is_one());
        Ok(peel_order(multiple, &factors, |t| self.pow(t).is_one()))
    }
}

impl fmt::Display for Fp2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.x, self.y, self.ctx.delta)
    }
}

// Operator forms panic on mixed contexts; use the checked_* methods to get
// an error instead.
impl Add for Fp2Element {
    type Output = Fp2Element;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("mixed quadratic contexts")
    }
}

impl Sub for Fp2Element {
    type Output = Fp2Element;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("mixed quadratic contexts")
    }
}

impl Mul for Fp2Element {
    type Output = Fp2Element;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("mixed quadratic contexts")
    }
}

impl Neg for Fp2Element {
    type Output = Fp2Element;
    fn neg(self) -> Self {
        let p = self.ctx.p;
        Self::new(self.ctx, sub_mod(0, self.x, p), sub_mod(0, self.y, p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fp2Op {
    Add,
    Sub,
    Mul,
    Inv,
}

/// Dispatches one field operation. `rhs` is ignored for [`Fp2Op::Inv`] and
/// required otherwise.
pub fn fp2_arith(op: Fp2Op, lhs: &Fp2Element, rhs: Option<&Fp2Element>) -> Result<Fp2Element> {
    let need = || rhs.ok_or(Error::ContextMismatch);
    match op {
        Fp2Op::Add => lhs.checked_add(need()?),
        Fp2Op::Sub => lhs.checked_sub(need()?),
        Fp2Op::Mul => lhs.checked_mul(need()?),
        Fp2Op::Inv => lhs.inv(),
    }
}

pub fn fp2_pow(u: &Fp2Element, e: u128) -> Fp2Element {
    u.pow(e)
}

pub fn frobenius(u: &Fp2Element) -> Result<Fp2Element> {
    u.frobenius()
}

pub fn fp2_order(u: &Fp2Element) -> Result<u128> {
    u.order()
}

/// Roots `lambda = (A + sqrt(delta)) / 2` and `lambda_bar = (A - sqrt(delta)) / 2`
/// of `x^2 - A x - B` over an odd prime.
///
/// In a ramified context both roots are the repeated root `A / 2`.
pub fn eigenvalues(a: i64, b: i64, p: u64) -> Result<(Fp2Element, Fp2Element)> {
    let delta = a as i128 * a as i128 + 4 * b as i128;
    let ctx = FieldCtx::new(p, delta)?;
    let half = mod_inv(2, p)?;
    let a = reduce(a as i128, p);
    let re = mul_mod(a, half, p);
    if ctx.class == ResidueClass::Ramified {
        let r = ctx.scalar(re);
        return Ok((r, r));
    }
    let lambda = ctx.element(re, half);
    let lambda_bar = ctx.element(re, p - half);
    Ok((lambda, lambda_bar))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, delta: i128) -> FieldCtx {
        FieldCtx::new(p, delta).unwrap()
    }

    #[test]
    fn classes() {
        assert_eq!(ctx(11, 5).residue_class(), ResidueClass::Split);
        assert_eq!(ctx(7, 5).residue_class(), ResidueClass::Inert);
        assert_eq!(ctx(5, 5).residue_class(), ResidueClass::Ramified);
        assert_eq!(ctx(11, 5).sqrt_delta(), Some(4));
        assert_eq!(FieldCtx::new(2, 5), Err(Error::WrongModulus { m: 2 }));
        assert!(FieldCtx::new(9, 5).is_err());
    }

    #[test]
    fn arith_examples() {
        let c = ctx(7, 5);
        let s = c.sqrt_delta_element();
        assert_eq!(
            fp2_arith(Fp2Op::Mul, &s, Some(&s)).unwrap().coords(),
            (5, 0)
        );
        assert_eq!(fp2_arith(Fp2Op::Inv, &c.one(), None).unwrap(), c.one());
        let half = 4; // 2 * 4 = 8 = 1 mod 7
        let lambda = c.element(half, half);
        let lambda_bar = c.element(half, 7 - half);
        assert_eq!((lambda * lambda_bar).coords(), (6, 0));
    }

    #[test]
    fn arith_errors() {
        let c = ctx(7, 5);
        assert_eq!(c.zero().inv(), Err(Error::ZeroDivision));
        let other = ctx(11, 5).one();
        assert_eq!(c.one().checked_mul(&other), Err(Error::ContextMismatch));
        assert_eq!(
            fp2_arith(Fp2Op::Add, &c.one(), None),
            Err(Error::ContextMismatch)
        );
        // (0, 1) is nilpotent when 5 | delta
        let r = ctx(5, 5);
        assert_eq!(r.sqrt_delta_element().inv(), Err(Error::NormZero));
        // split: (r, 1) has zero norm when r^2 = delta
        let s = ctx(11, 5);
        assert_eq!(s.element(4, 1).inv(), Err(Error::NormZero));
    }

    #[test]
    fn pow_examples() {
        let c = ctx(7, 5);
        let s = c.sqrt_delta_element();
        assert_eq!(fp2_pow(&s, 0), c.one());
        assert_eq!(fp2_pow(&s, 7).coords(), (0, 6));
        let lambda = c.element(4, 4);
        assert_eq!(fp2_pow(&lambda, 2 * 8), c.one());
    }

    #[test]
    fn frobenius_examples() {
        let c = ctx(7, 5);
        for x in 0..7 {
            assert_eq!(frobenius(&c.scalar(x)).unwrap(), c.scalar(x));
        }
        assert_eq!(frobenius(&c.sqrt_delta_element()).unwrap().coords(), (0, 6));
        for x in 0..7 {
            for y in 0..7 {
                let u = c.element(x, y);
                let f = frobenius(&u).unwrap();
                assert_eq!(frobenius(&f).unwrap(), u);
                assert_eq!(f, u.pow(7));
            }
        }
        assert_eq!(frobenius(&ctx(11, 5).one()), Err(Error::WrongContext));
        assert_eq!(frobenius(&ctx(5, 5).one()), Err(Error::WrongContext));
    }

    #[test]
    fn eigenvalue_examples() {
        // sqrt(5) = 4 mod 11 (4^2 = 16 = 5), 2^-1 = 6
        let (l, lb) = eigenvalues(1, 1, 11).unwrap();
        assert_eq!(l.embed(), Some(8));
        assert_eq!(lb.embed(), Some(4));
        assert_eq!((8 + 4) % 11, 1);
        assert_eq!(8 * 4 % 11, 10);

        let (l, lb) = eigenvalues(1, 1, 7).unwrap();
        assert_eq!(l.coords(), (4, 4));
        assert_eq!(lb.coords(), (4, 3));
        assert_eq!(l * l, l + l.ctx().one());

        let (l, lb) = eigenvalues(1, 1, 5).unwrap();
        assert_eq!(l.coords(), (3, 0));
        assert_eq!(l, lb);
    }

    #[test]
    fn order_examples() {
        let c = ctx(7, 5);
        assert_eq!(fp2_order(&c.one()), Ok(1));
        assert_eq!(fp2_order(&c.zero()), Err(Error::ZeroElement));

        // brute-force oracle: powers until one
        let brute = |u: Fp2Element| {
            let mut t = 1u128;
            let mut v = u;
            while !v.is_one() {
                v = v * u;
                t += 1;
            }
            t
        };
        let (l, lb) = eigenvalues(1, 1, 11).unwrap();
        assert_eq!(brute(l), 10);
        assert_eq!(fp2_order(&l), Ok(10));
        assert_eq!(fp2_order(&lb), Ok(brute(lb)));
        let (l, _) = eigenvalues(1, 1, 7).unwrap();
        assert_eq!(brute(l), 16);
        assert_eq!(fp2_order(&l), Ok(16));
    }

    #[test]
    fn order_exhaustive_small() {
        for (p, delta) in [(7u64, 5i128), (11, 5), (13, 17), (5, 5), (3, 0), (7, 3)] {
            let c = ctx(p, delta);
            for x in 0..p {
                for y in 0..p {
                    let u = c.element(x, y);
                    if u.is_zero() || u.norm() == 0 {
                        continue;
                    }
                    let mut t = 1u128;
                    let mut v = u;
                    while !v.is_one() {
                        v = v * u;
                        t += 1;
                    }
                    assert_eq!(u.order().unwrap(), t, "p={p} delta={delta} u={u}");
                }
            }
        }
    }

    #[test]
    fn inverse_every_nonzero_inert() {
        let c = ctx(19, 13);
        for x in 0..19 {
            for y in 0..19 {
                let u = c.element(x, y);
                if u.is_zero() {
                    continue;
                }
                assert_eq!(u * u.inv().unwrap(), c.one());
            }
        }
    }
}
