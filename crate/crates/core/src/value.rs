//! Exact rationals and certified rational intervals.
//!
//! Every measure and character value is a [`Value`]: a closed interval
//! `[lo, hi]` with rational endpoints. Exact values have `lo == hi`; any
//! approximate input widens the interval and the width travels with the
//! result.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` in lowest terms (`p` alone when `q = 1`).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, `p`, or a plain decimal like `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |m: &str| Error::Parse {
        location: format!("rational {s:?}"),
        message: m.to_string(),
    };
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(BigRational::new(p, q))
    } else if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| bad("bad decimal"))?;
        let d = num::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        Ok(if neg { -r } else { r })
    } else {
        let n: BigInt = s.parse().map_err(|_| bad("bad integer"))?;
        Ok(BigRational::from_integer(n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value {
    lo: Rational,
    hi: Rational,
}

impl Value {
    pub fn exact(r: Rational) -> Self {
        Value { lo: r.clone(), hi: r }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Value { lo, hi }
    }

    pub fn zero() -> Self {
        Value::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Value::exact(Rational::one())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn add(&self, other: &Value) -> Value {
        Value {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        Value {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn scale(&self, k: &Rational) -> Value {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b {
            Value { lo: a, hi: b }
        } else {
            Value { lo: b, hi: a }
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Value { lo, hi }
    }

    /// `self^k` with `0^0 = 1`.
    pub fn pow(&self, k: u32) -> Value {
        let mut acc = Value::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn abs(&self) -> Value {
        if self.lo.is_negative() && self.hi.is_positive() {
            let hi = std::cmp::max(-self.lo.clone(), self.hi.clone());
            Value::interval(Rational::zero(), hi)
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            Value::interval(-self.hi.clone(), -self.lo.clone())
        } else {
            self.clone()
        }
    }

    /// True when the two intervals intersect.
    pub fn overlaps(&self, other: &Value) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::exact(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", format_rational(&self.lo))
        } else {
            write!(
                f,
                "[{}, {}]",
                format_rational(&self.lo),
                format_rational(&self.hi)
            )
        }
    }
}
