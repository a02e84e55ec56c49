//! Probability weights that stay exact when the input is exact.
//!
//! Scenarios declared with rational weights `p/q` keep every measure,
//! pmf and fine-graining computation in exact arithmetic; decimal inputs
//! follow an ordinary `f64` path instead.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real number carried either as an exact rational or as a double.
///
/// Arithmetic between two exact values stays exact; any operation that
/// mixes in a float demotes the result to the float path.
#[derive(Clone, Debug)]
pub enum Weight {
    Exact(BigRational),
    Float(f64),
}

impl Weight {
    pub fn zero() -> Self {
        Weight::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight::Exact(BigRational::one())
    }

    /// Exact `p/q`. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Weight::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Weight::Exact(r)
    }

    pub fn from_f64(x: f64) -> Self {
        Weight::Float(x)
    }

    /// Parses `"p/q"` (exact), a bare integer (exact) or a decimal (float).
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let fail = || Error::WeightParse(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| fail())?;
            let q: BigInt = q.trim().parse().map_err(|_| fail())?;
            if q.is_zero() {
                return Err(fail());
            }
            return Ok(Weight::Exact(BigRational::new(p, q)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Weight::Exact(BigRational::from_integer(n)));
        }
        let x: f64 = s.parse().map_err(|_| fail())?;
        if !x.is_finite() {
            return Err(fail());
        }
        Ok(Weight::Float(x))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weight::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Weight::Exact(r) => Some(r),
            Weight::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => big_ratio_to_f64(r),
            Weight::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_zero(),
            Weight::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_one(),
            Weight::Float(x) => *x == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_negative(),
            Weight::Float(x) => *x < 0.0,
        }
    }

    pub fn add(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a + b),
            _ => Weight::Float(self.to_f64() + rhs.to_f64()),
        }
    }

    pub fn sub(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a - b),
            _ => Weight::Float(self.to_f64() - rhs.to_f64()),
        }
    }

    pub fn mul(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a * b),
            _ => Weight::Float(self.to_f64() * rhs.to_f64()),
        }
    }

    pub fn pow(&self, exp: u64) -> Weight {
        match self {
            Weight::Exact(r) => match i32::try_from(exp) {
                Ok(e) => Weight::Exact(Pow::pow(r, e)),
                Err(_) => Weight::Float(self.to_f64().powf(exp as f64)),
            },
            Weight::Float(x) => Weight::Float(x.powf(exp as f64)),
        }
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn recip(&self) -> Result<Weight> {
        if self.is_zero() {
            return Err(Error::DegenerateOutcome);
        }
        Ok(match self {
            Weight::Exact(r) => Weight::Exact(r.recip()),
            Weight::Float(x) => Weight::Float(1.0 / x),
        })
    }

    pub fn approx_eq(&self, rhs: &Weight, tol: f64) -> bool {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => a == b,
            _ => (self.to_f64() - rhs.to_f64()).abs() <= tol,
        }
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Weight::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `f64` projection of a big rational that stays correct when the numerator
/// or denominator has thousands of bits (where naive `to_f64` on each half
/// returns `inf/inf`). Takes the top 64 bits of each side and re-applies the
/// dropped power of two; relative error is below 1e-15.
pub fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let n_bits = n.bits();
    let d_bits = d.bits();
    if n_bits <= 52 && d_bits <= 52 {
        let quick = n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN);
        return if r.is_negative() { -quick } else { quick };
    }
    let n_shift = n_bits.saturating_sub(64);
    let d_shift = d_bits.saturating_sub(64);
    let n_top = top_bits(n, n_shift);
    let d_top = top_bits(d, d_shift);
    let scale = n_shift as i64 - d_shift as i64;
    let val = (n_top / d_top) * exp2_i64(scale);
    if r.is_negative() {
        -val
    } else {
        val
    }
}

fn top_bits(x: &BigUint, shift: u64) -> f64 {
    if shift == 0 {
        x.to_f64().unwrap_or(f64::INFINITY)
    } else {
        (x >> shift).to_f64().unwrap_or(f64::INFINITY)
    }
}

fn exp2_i64(e: i64) -> f64 {
    if e > i32::MAX as i64 {
        f64::INFINITY
    } else if e < i32::MIN as i64 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

/// Exact square root of a non-negative rational, when one exists.
pub fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let sn = n.sqrt();
    if &(&sn * &sn) != n {
        return None;
    }
    let sd = d.sqrt();
    if &(&sd * &sd) != d {
        return None;
    }
    // numer/denom were coprime, so their roots are too.
    Some(BigRational::new_raw(BigInt::from(sn), BigInt::from(sd)))
}

/// Rational `p/q` from `u64` parts; convenience for tests and constructors.
pub fn big_ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational equal to the given float (every finite `f64` is rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}
