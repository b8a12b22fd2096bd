//! Truncated jet arithmetic.
//!
//! A jet is a Taylor polynomial in nilpotent deformation parameters,
//! truncated exactly: arithmetic on jets at the origin reproduces the
//! derivatives of the deformed moments without symbolic differentiation.
//! Three shapes cover every lattice binding in this crate:
//!
//! * [`Jet1`]: `a + a' e_t` with `e_t^2 = 0` (one first derivative),
//! * [`Jet2`]: `a + a' e_t + (a''/2) e_t^2` with `e_t^3 = 0`,
//! * [`JetTS`]: `a + a_t e_t + a_s e_s + a_ts e_t e_s` with
//!   `e_t^2 = e_s^2 = 0` (mixed first derivatives in two parameters).
//!
//! The deformation factors `exp(e_t x)` and `exp(e_s q)` truncate exactly at
//! the origin, so jet moments over discrete rational measures are exact.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Ring};

/// How a scalar backend lifts measure data and deformation factors.
///
/// Plain scalars carry no derivative data (`t_factor` is 1); jet backends
/// attach the truncated exponential factors node by node.
pub trait MomentScalar: Field {
    type Base: Field;
    fn from_base(b: &Self::Base) -> Self;
    /// Truncation of `exp(e_t x)` in this backend.
    fn t_factor(x: &Self::Base) -> Self;
    /// Truncation of `exp(e_s q)` in this backend.
    fn s_factor(q: &Self::Base) -> Self;
    /// Order-zero part.
    fn order0(&self) -> Self::Base;
    /// Coefficient of `e_t` (zero for jet-free backends).
    fn dt(&self) -> Self::Base;
    /// Coefficient of `e_s`.
    fn ds(&self) -> Self::Base;
    /// Second `t`-derivative, i.e. twice the `e_t^2` coefficient.
    fn dtt(&self) -> Self::Base;
    /// Mixed derivative, the `e_t e_s` coefficient.
    fn dts(&self) -> Self::Base;
}

impl MomentScalar for crate::scalar::Rat {
    type Base = Self;
    fn from_base(b: &Self) -> Self {
        b.clone()
    }
    fn t_factor(_x: &Self) -> Self {
        Self::one()
    }
    fn s_factor(_q: &Self) -> Self {
        Self::one()
    }
    fn order0(&self) -> Self {
        self.clone()
    }
    fn dt(&self) -> Self {
        Self::zero()
    }
    fn ds(&self) -> Self {
        Self::zero()
    }
    fn dtt(&self) -> Self {
        Self::zero()
    }
    fn dts(&self) -> Self {
        Self::zero()
    }
}

impl MomentScalar for f64 {
    type Base = f64;
    fn from_base(b: &f64) -> f64 {
        *b
    }
    fn t_factor(_x: &f64) -> f64 {
        1.0
    }
    fn s_factor(_q: &f64) -> f64 {
        1.0
    }
    fn order0(&self) -> f64 {
        *self
    }
    fn dt(&self) -> f64 {
        0.0
    }
    fn ds(&self) -> f64 {
        0.0
    }
    fn dtt(&self) -> f64 {
        0.0
    }
    fn dts(&self) -> f64 {
        0.0
    }
}

macro_rules! jet_ops {
    ($name:ident, $n:expr) => {
        impl<B: Field> Add for $name<B> {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                let mut c = self.c;
                for (a, b) in c.iter_mut().zip(rhs.c.into_iter()) {
                    *a = a.clone() + b;
                }
                Self { c }
            }
        }
        impl<B: Field> Sub for $name<B> {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                let mut c = self.c;
                for (a, b) in c.iter_mut().zip(rhs.c.into_iter()) {
                    *a = a.clone() - b;
                }
                Self { c }
            }
        }
        impl<B: Field> Neg for $name<B> {
            type Output = Self;
            fn neg(self) -> Self {
                let mut c = self.c;
                for a in c.iter_mut() {
                    *a = -a.clone();
                }
                Self { c }
            }
        }
    };
}

/// First-order jet `c[0] + c[1] e_t`.
#[derive(Clone, PartialEq, Debug)]
pub struct Jet1<B> {
    pub c: [B; 2],
}

jet_ops!(Jet1, 2);

impl<B: Field> Jet1<B> {
    pub fn new(v: B, d: B) -> Self {
        Self { c: [v, d] }
    }
}

impl<B: Field> Mul for Jet1<B> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1] = self.c;
        let [b0, b1] = rhs.c;
        Self {
            c: [
                a0.clone() * b0.clone(),
                a0 * b1 + a1 * b0,
            ],
        }
    }
}

impl<B: Field> Ring for Jet1<B> {
    fn zero() -> Self {
        Self { c: [B::zero(), B::zero()] }
    }
    fn one() -> Self {
        Self { c: [B::one(), B::zero()] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn from_i64(v: i64) -> Self {
        Self { c: [B::from_i64(v), B::zero()] }
    }
}

impl<B: Field> Field for Jet1<B> {
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        let [b0, b1] = &rhs.c;
        let c0 = self.c[0].try_div(b0)?;
        let c1 = (self.c[1].clone() - c0.clone() * b1.clone()).try_div(b0)?;
        Some(Self { c: [c0, c1] })
    }
}

impl<B: Field> MomentScalar for Jet1<B> {
    type Base = B;
    fn from_base(b: &B) -> Self {
        Self { c: [b.clone(), B::zero()] }
    }
    fn t_factor(x: &B) -> Self {
        Self { c: [B::one(), x.clone()] }
    }
    fn s_factor(_q: &B) -> Self {
        Self::one()
    }
    fn order0(&self) -> B {
        self.c[0].clone()
    }
    fn dt(&self) -> B {
        self.c[1].clone()
    }
    fn ds(&self) -> B {
        B::zero()
    }
    fn dtt(&self) -> B {
        B::zero()
    }
    fn dts(&self) -> B {
        B::zero()
    }
}

/// Second-order jet `c[0] + c[1] e_t + c[2] e_t^2`.
#[derive(Clone, PartialEq, Debug)]
pub struct Jet2<B> {
    pub c: [B; 3],
}

jet_ops!(Jet2, 3);

impl<B: Field> Jet2<B> {
    pub fn new(v: B, d: B, d2_half: B) -> Self {
        Self { c: [v, d, d2_half] }
    }
}

impl<B: Field> Mul for Jet2<B> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.c;
        let [b0, b1, b2] = rhs.c;
        Self {
            c: [
                a0.clone() * b0.clone(),
                a0.clone() * b1.clone() + a1.clone() * b0.clone(),
                a0 * b2 + a1 * b1 + a2 * b0,
            ],
        }
    }
}

impl<B: Field> Ring for Jet2<B> {
    fn zero() -> Self {
        Self { c: [B::zero(), B::zero(), B::zero()] }
    }
    fn one() -> Self {
        Self { c: [B::one(), B::zero(), B::zero()] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn from_i64(v: i64) -> Self {
        Self { c: [B::from_i64(v), B::zero(), B::zero()] }
    }
}

impl<B: Field> Field for Jet2<B> {
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        let [b0, b1, b2] = &rhs.c;
        let c0 = self.c[0].try_div(b0)?;
        let c1 = (self.c[1].clone() - c0.clone() * b1.clone()).try_div(b0)?;
        let c2 = (self.c[2].clone() - c0.clone() * b2.clone() - c1.clone() * b1.clone())
            .try_div(b0)?;
        Some(Self { c: [c0, c1, c2] })
    }
}

impl<B: Field> MomentScalar for Jet2<B> {
    type Base = B;
    fn from_base(b: &B) -> Self {
        Self { c: [b.clone(), B::zero(), B::zero()] }
    }
    fn t_factor(x: &B) -> Self {
        // exp(e x) = 1 + e x + e^2 x^2/2
        let half = B::one().try_div(&B::from_i64(2)).expect("2 invertible");
        Self { c: [B::one(), x.clone(), x.clone() * x.clone() * half] }
    }
    fn s_factor(_q: &B) -> Self {
        Self::one()
    }
    fn order0(&self) -> B {
        self.c[0].clone()
    }
    fn dt(&self) -> B {
        self.c[1].clone()
    }
    fn ds(&self) -> B {
        B::zero()
    }
    fn dtt(&self) -> B {
        B::from_i64(2) * self.c[2].clone()
    }
    fn dts(&self) -> B {
        B::zero()
    }
}

/// Mixed jet `c[0] + c[1] e_t + c[2] e_s + c[3] e_t e_s`.
#[derive(Clone, PartialEq, Debug)]
pub struct JetTS<B> {
    pub c: [B; 4],
}

jet_ops!(JetTS, 4);

impl<B: Field> Mul for JetTS<B> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        Self {
            c: [
                a0.clone() * b0.clone(),
                a0.clone() * b1.clone() + a1.clone() * b0.clone(),
                a0.clone() * b2.clone() + a2.clone() * b0.clone(),
                a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
            ],
        }
    }
}

impl<B: Field> Ring for JetTS<B> {
    fn zero() -> Self {
        Self { c: [B::zero(), B::zero(), B::zero(), B::zero()] }
    }
    fn one() -> Self {
        Self { c: [B::one(), B::zero(), B::zero(), B::zero()] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn from_i64(v: i64) -> Self {
        Self { c: [B::from_i64(v), B::zero(), B::zero(), B::zero()] }
    }
}

impl<B: Field> Field for JetTS<B> {
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        let [b0, b1, b2, b3] = &rhs.c;
        let c0 = self.c[0].try_div(b0)?;
        let c1 = (self.c[1].clone() - c0.clone() * b1.clone()).try_div(b0)?;
        let c2 = (self.c[2].clone() - c0.clone() * b2.clone()).try_div(b0)?;
        let c3 = (self.c[3].clone()
            - c0.clone() * b3.clone()
            - c1.clone() * b2.clone()
            - c2.clone() * b1.clone())
        .try_div(b0)?;
        Some(Self { c: [c0, c1, c2, c3] })
    }
}

impl<B: Field> MomentScalar for JetTS<B> {
    type Base = B;
    fn from_base(b: &B) -> Self {
        Self { c: [b.clone(), B::zero(), B::zero(), B::zero()] }
    }
    fn t_factor(x: &B) -> Self {
        Self { c: [B::one(), x.clone(), B::zero(), B::zero()] }
    }
    fn s_factor(q: &B) -> Self {
        Self { c: [B::one(), B::zero(), q.clone(), B::zero()] }
    }
    fn order0(&self) -> B {
        self.c[0].clone()
    }
    fn dt(&self) -> B {
        self.c[1].clone()
    }
    fn ds(&self) -> B {
        self.c[2].clone()
    }
    fn dtt(&self) -> B {
        B::zero()
    }
    fn dts(&self) -> B {
        self.c[3].clone()
    }
}
