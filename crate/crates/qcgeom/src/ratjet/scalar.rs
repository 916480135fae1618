use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator (maintained by the underlying representation).
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "rational with zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders `p/q`, or just `p` when the denominator is one.  This is the
/// canonical form used in reports and chart files.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses the canonical `p/q` form accepted in chart files and point lists.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Json {
        message: format!("invalid rational `{text}`: {msg}"),
    };
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad("bad numerator"))?;
    let denom: BigInt = denom.parse().map_err(|_| bad("bad denominator"))?;
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Coefficient field for jets.
///
/// The engine never needs more than exact field arithmetic plus two optional
/// capabilities: conversion from a rational constant, and a total order
/// (`sign`).  The rational implementation supports both; the prime field
/// returns `None` from [`Scalar::sign`], which makes every positivity check
/// report "not decidable here" instead of a bogus answer.
pub trait Scalar: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` exactly when `self` is zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(value: &Rational) -> Self;
    fn from_int(value: i64) -> Self;
    /// Comparison against zero, when the field is ordered.
    fn sign(&self) -> Option<Ordering>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn one() -> Self {
        <Rational as One>::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn from_int(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }

    fn sign(&self) -> Option<Ordering> {
        Some(if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        })
    }
}

/// The prescreen prime: the first prime above `2^61`.  Large enough that a
/// "zero mod p" residual is overwhelming evidence of a true zero, small
/// enough that products fit in `u128`.
pub const PRESCREEN_PRIME: u64 = 2_305_843_009_213_693_967;

/// Element of the prime field `Z / PRESCREEN_PRIME`, stored reduced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp(u64);

impl Fp {
    pub fn new(value: u64) -> Self {
        Fp(value % PRESCREEN_PRIME)
    }

    pub fn residue(self) -> u64 {
        self.0
    }

    fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Scalar::mul(&acc, &base);
            }
            base = Scalar::mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    fn from_bigint(value: &BigInt) -> Self {
        let p = BigInt::from(PRESCREEN_PRIME);
        let mut r = value % &p;
        if r.is_negative() {
            r += &p;
        }
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp(0)
    }

    fn one() -> Self {
        Fp(1)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, other: &Self) -> Self {
        let s = self.0 + other.0; // < 2^62, no overflow
        Fp(if s >= PRESCREEN_PRIME { s - PRESCREEN_PRIME } else { s })
    }

    fn sub(&self, other: &Self) -> Self {
        if self.0 >= other.0 {
            Fp(self.0 - other.0)
        } else {
            Fp(self.0 + (PRESCREEN_PRIME - other.0))
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Fp((u128::from(self.0) * u128::from(other.0) % u128::from(PRESCREEN_PRIME)) as u64)
    }

    fn neg(&self) -> Self {
        if self.0 == 0 {
            Fp(0)
        } else {
            Fp(PRESCREEN_PRIME - self.0)
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(PRESCREEN_PRIME - 2))
        }
    }

    fn from_rational(value: &Rational) -> Self {
        let numer = Fp::from_bigint(value.numer());
        let denom = Fp::from_bigint(value.denom());
        let inv = denom
            .inv()
            .expect("denominator divisible by the prescreen prime");
        Scalar::mul(&numer, &inv)
    }

    fn from_int(value: i64) -> Self {
        if value >= 0 {
            Fp::new(value as u64)
        } else {
            Scalar::neg(&Fp::new(value.unsigned_abs()))
        }
    }

    fn sign(&self) -> Option<Ordering> {
        None
    }
}
