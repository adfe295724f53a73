//! Arithmetic in prime fields `F_q`.
//!
//! [`PrimeField`] is a copyable handle carrying the modulus. Hot paths
//! (matrix elimination, products) work directly on canonical `u64`
//! residues through the field's methods; [`FieldElement`] is the
//! self-describing value type used at API boundaries, where mixing
//! residues of two different fields must be caught.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive). Sums of two residues stay below 2^64.
pub const MAX_MODULUS: u64 = 1 << 63;

/// A prime field `F_q` with `2 <= q < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&q) {
            return Err(Error::ModulusOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Wraps an arbitrary integer, reducing it mod q.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement { value: value % self.q, q: self.q }
    }

    /// Wraps an integer that must already be a canonical residue.
    pub fn try_element(&self, value: u64) -> Result<FieldElement> {
        self.check(value)?;
        Ok(FieldElement { value, q: self.q })
    }

    /// Maps a signed integer into the field.
    pub fn from_i64(&self, value: i64) -> u64 {
        let r = (value as i128).rem_euclid(self.q as i128);
        r as u64
    }

    pub fn check(&self, value: u64) -> Result<()> {
        if value < self.q {
            Ok(())
        } else {
            Err(Error::NotAResidue { value, q: self.q })
        }
    }

    pub fn ensure_same(&self, other: &PrimeField) -> Result<()> {
        if self.q == other.q {
            Ok(())
        } else {
            Err(Error::FieldMismatch { left: self.q, right: other.q })
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.q - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    /// Square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.q;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.q as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A residue tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    q: u64,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<PrimeField> {
        let f = self.field();
        f.ensure_same(&other.field())?;
        Ok(f)
    }

    pub fn try_add(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same_field(&other)?;
        Ok(FieldElement { value: f.add(self.value, other.value), q: self.q })
    }

    pub fn try_sub(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same_field(&other)?;
        Ok(FieldElement { value: f.sub(self.value, other.value), q: self.q })
    }

    pub fn try_mul(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same_field(&other)?;
        Ok(FieldElement { value: f.mul(self.value, other.value), q: self.q })
    }

    pub fn try_div(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same_field(&other)?;
        Ok(FieldElement { value: f.div(self.value, other.value)?, q: self.q })
    }

    pub fn inv(self) -> Result<FieldElement> {
        Ok(FieldElement { value: self.field().inv(self.value)?, q: self.q })
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        FieldElement { value: self.field().pow(self.value, exp), q: self.q }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mismatched moduli; use the `try_*` methods to get an error instead.

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch in +")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch in -")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch in *")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { value: self.field().neg(self.value), q: self.q }
    }
}

/// Deterministic Miller-Rabin, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
