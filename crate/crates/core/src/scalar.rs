//! Matrix entries: exact rationals, square roots of integers, or floats.

use alloc::format;
use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// A single matrix entry.
///
/// Integers, fractions and finite decimals are all held as reduced
/// [`BigRational`]s. `Surd` stands for `coeff * sqrt(radicand)` with a
/// square-free `radicand >= 2`; anything that normalizes to a rational is
/// stored as one.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Surd { coeff: BigRational, radicand: u64 },
    Float(f64),
}

impl Scalar {
    pub fn int(value: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    /// `numer / denom`, reduced. Fails on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::InvalidScalar(format!("{numer}/{denom}")));
        }
        Ok(Scalar::Rational(BigRational::new(numer.into(), denom.into())))
    }

    /// `sqrt(m)` normalized so that the radicand is square-free.
    pub fn sqrt(m: u64) -> Self {
        Self::surd(BigRational::one(), m)
    }

    fn surd(coeff: BigRational, m: u64) -> Self {
        if m == 0 || coeff.is_zero() {
            return Scalar::zero();
        }
        let (outer, inner) = split_square(m);
        let coeff = coeff * BigRational::from_integer(BigInt::from(outer));
        if inner == 1 {
            Scalar::Rational(coeff)
        } else {
            Scalar::Surd { coeff, radicand: inner }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_integer(),
            Scalar::Surd { .. } => false,
            Scalar::Float(x) => libm::trunc(*x) == *x && x.is_finite(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Surd { coeff, .. } => coeff.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(q) => rational_to_f64(q),
            Scalar::Surd { coeff, radicand } => rational_to_f64(coeff) * libm::sqrt(*radicand as f64),
            Scalar::Float(x) => *x,
        }
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Writes `m = outer^2 * inner` with `inner` square-free.
fn split_square(mut m: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut inner = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            inner *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outer, inner * m)
}

impl From<i64> for Scalar {
    fn from(value: i64) -> Self {
        Scalar::int(value)
    }
}

impl From<BigRational> for Scalar {
    fn from(value: BigRational) -> Self {
        Scalar::Rational(value)
    }
}

impl From<f64> for Scalar {
    fn from(value: f64) -> Self {
        Scalar::Float(value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Surd { coeff, radicand } => {
                // coeff * sqrt(r) = sign * sqrt(coeff^2 r); printable in the
                // `sqrt(m)` grammar only when coeff^2 r is an integer.
                let sq = coeff * coeff * BigRational::from_integer(BigInt::from(*radicand));
                match (sq.is_integer(), sq.to_integer().to_u64()) {
                    (true, Some(m)) => {
                        let sign = if coeff.is_negative() { "-" } else { "" };
                        write!(f, "{sign}sqrt({m})")
                    }
                    _ => write!(f, "{}", self.to_f64()),
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts an optional sign followed by an integer, `p/q`, a finite
    /// decimal, or `sqrt(m)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidScalar(s.to_string());
        let t = s.trim();
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let value = if let Some(inner) = body.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let m: u64 = parse_digits(inner.trim()).ok_or_else(bad)?.to_u64().ok_or_else(bad)?;
            Scalar::sqrt(m)
        } else if let Some((p, q)) = body.split_once('/') {
            let p = parse_digits(p).ok_or_else(bad)?;
            let q = parse_digits(q).ok_or_else(bad)?;
            if q.is_zero() {
                return Err(bad());
            }
            Scalar::Rational(BigRational::new(p, q))
        } else if let Some((whole, frac)) = body.split_once('.') {
            if whole.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            let whole = if whole.is_empty() { BigInt::zero() } else { parse_digits(whole).ok_or_else(bad)? };
            let frac_value = if frac.is_empty() { BigInt::zero() } else { parse_digits(frac).ok_or_else(bad)? };
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            Scalar::Rational(BigRational::new(whole * &scale + frac_value, scale))
        } else {
            Scalar::Rational(BigRational::from_integer(parse_digits(body).ok_or_else(bad)?))
        };
        Ok(if negative { -value } else { value })
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

impl core::ops::Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Surd { coeff, radicand } => Scalar::Surd { coeff: -coeff, radicand },
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Scalar {

    /// Rational power with integer exponent; `None` for non-rational bases.
    pub fn pow_rational(&self, exp: i32) -> Option<Scalar> {
        self.as_rational().map(|q| Scalar::Rational(num_traits::Pow::pow(q, exp)))
    }
}
