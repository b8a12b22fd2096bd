//! Scalar backends.
//!
//! Every algebraic routine in the crate is generic over a small [`Ring`] /
//! [`Field`] pair. Two base backends are provided: exact rationals
//! ([`Rat`], arbitrary precision) and `f64`. Jets (`crate::jet`) wrap a base
//! backend and implement the same traits, so moment systems and Pfaffians
//! carry derivative data through unchanged code paths.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Commutative ring with identity; the minimum the Pfaffian engine needs.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
}

/// Ring with division where the divisor is invertible.
///
/// For jets "invertible" means the order-zero part is nonzero; `try_div`
/// returns `None` otherwise rather than panicking, so callers can surface
/// `DegenerateTau`-style errors.
pub trait Field: Ring {
    fn try_div(&self, rhs: &Self) -> Option<Self>;
}

impl Ring for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn is_zero(&self) -> bool {
        <Rat as Zero>::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
}

impl Field for Rat {
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        if <Rat as Zero>::is_zero(rhs) {
            None
        } else {
            Some(self / rhs)
        }
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Field for f64 {
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        if *rhs == 0.0 {
            None
        } else {
            Some(self / rhs)
        }
    }
}

/// Absolute value of a scalar as `f64`, used for float-backend tolerance
/// checks and residual reports.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for Rat {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Exact integer power with negative exponents allowed (field inverse).
pub fn pow_field<S: Field>(x: &S, e: i64) -> Option<S> {
    if e == 0 {
        return Some(S::one());
    }
    let base = if e < 0 { S::one().try_div(x)? } else { x.clone() };
    let mut acc = S::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * base.clone();
    }
    Some(acc)
}

/// Binomial coefficient `C(n, k)` for small `n >= 0`; zero outside range.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Convert a rational to `f64` (lossy), for float-backend mirrors of exact data.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"p"`, `"p/q"` or a plain integer into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if <BigInt as Zero>::is_zero(&d) {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}
