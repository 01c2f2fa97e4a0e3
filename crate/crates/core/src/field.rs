//! Prime-field arithmetic GF(q).
//!
//! [`FieldSpec`] carries the modulus and offers raw `u32` arithmetic used by the
//! matrix code on hot paths. [`FieldElement`] is the checked, self-describing
//! value type for the public API: every binary operation verifies that both
//! operands live in the same field.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted. Products are formed in `u64`, so anything below
/// 2^32 is safe; 2^31 leaves headroom for sums.
pub const MAX_MODULUS: u32 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),
    #[error("mismatched fields: GF({0}) vs GF({1})")]
    Mismatch(u32, u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("value {value} is not a canonical element of GF({q})")]
    OutOfRange { value: u64, q: u32 },
}

/// A prime field GF(q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    q: u32,
}

impl TryFrom<u32> for FieldSpec {
    type Error = FieldError;

    fn try_from(q: u32) -> Result<Self, FieldError> {
        FieldSpec::new(q)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.q
    }
}

/// Trial division; fine for moduli up to 2^31.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q > MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(q as u64));
        }
        if !is_prime(q as u64) {
            return Err(FieldError::NotPrime(q as u64));
        }
        Ok(FieldSpec { q })
    }

    /// The smallest prime strictly greater than `n`: the default alphabet for
    /// a length-`n` construction.
    pub fn smallest_above(n: usize) -> Result<Self, FieldError> {
        let mut c = n as u64 + 1;
        while !is_prime(c) {
            c += 1;
        }
        if c > MAX_MODULUS as u64 {
            return Err(FieldError::ModulusTooLarge(c));
        }
        Ok(FieldSpec { q: c as u32 })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Wraps a canonical value, rejecting anything outside `[0, q)`.
    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.q as u64 {
            return Err(FieldError::OutOfRange { value, q: self.q });
        }
        Ok(FieldElement { value: value as u32, field: *self })
    }

    /// Wraps any integer after reducing it modulo `q`.
    pub fn reduce(&self, value: i64) -> FieldElement {
        FieldElement { value: value.rem_euclid(self.q as i64) as u32, field: *self }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, field: *self }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1 % self.q, field: *self }
    }

    /// All elements `0, 1, ..., q-1`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement { value, field: *self })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let q = self.q as u64;
        (if s >= q { s - q } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.q as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, base: u32, mut exp: u64) -> u32 {
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

    /// Inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::DivisionByZero(self.q));
        }
        let (mut old_r, mut r) = (a as i64, self.q as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        Ok(old_s.rem_euclid(self.q as i64) as u32)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// An element of a prime field. Displays and serializes as its canonical
/// decimal value in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: FieldSpec,
}

// Checked operations return `Result`, so the operator traits do not fit.
#[allow(clippy::should_implement_trait)]
impl FieldElement {
    #[inline]
    pub fn value(&self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field.q, other.field.q));
        }
        Ok(())
    }

    pub fn add(self, other: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&other)?;
        Ok(FieldElement { value: self.field.add(self.value, other.value), field: self.field })
    }

    pub fn sub(self, other: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&other)?;
        Ok(FieldElement { value: self.field.sub(self.value, other.value), field: self.field })
    }

    pub fn mul(self, other: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&other)?;
        Ok(FieldElement { value: self.field.mul(self.value, other.value), field: self.field })
    }

    pub fn div(self, other: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&other)?;
        let inv = self.field.inv(other.value)?;
        Ok(FieldElement { value: self.field.mul(self.value, inv), field: self.field })
    }

    pub fn neg(self) -> FieldElement {
        FieldElement { value: self.field.neg(self.value), field: self.field }
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        FieldElement { value: self.field.pow(self.value, exp), field: self.field }
    }

    pub fn inv(self) -> Result<FieldElement, FieldError> {
        Ok(FieldElement { value: self.field.inv(self.value)?, field: self.field })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.value)
    }
}
