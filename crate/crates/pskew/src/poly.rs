//! Dense polynomials over a generic ring, ascending coefficient order.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S> {
    /// Coefficients, `c[i]` multiplying `z^i`; no trailing zeros.
    pub c: Vec<S>,
}

impl<S: Ring> Poly<S> {
    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly { c: vec![S::one()] }
    }

    pub fn constant(v: S) -> Self {
        Poly { c: vec![v] }.normalized()
    }

    pub fn monomial(v: S, deg: usize) -> Self {
        let mut c = vec![S::zero(); deg + 1];
        c[deg] = v;
        Poly { c }.normalized()
    }

    pub fn from_coeffs(c: Vec<S>) -> Self {
        Poly { c }.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.c.last().map(|x| x.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> S {
        self.c.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn leading(&self) -> Option<&S> {
        self.c.last()
    }

    pub fn scale(&self, v: &S) -> Self {
        Poly { c: self.c.iter().map(|x| x.clone() * v.clone()).collect() }.normalized()
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![S::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn eval(&self, z: &S) -> S {
        let mut acc = S::zero();
        for coeff in self.c.iter().rev() {
            acc = acc * z.clone() + coeff.clone();
        }
        acc
    }

    /// Truncate to degree `<= n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly { c: self.c.iter().take(n + 1).cloned().collect() }.normalized()
    }
}

impl<S: Field> Poly<S> {
    /// Euclidean division; `None` when the divisor's leading coefficient is
    /// not invertible (or the divisor is zero).
    pub fn divmod(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.leading()?;
        let dd = d.degree()?;
        let mut rem = self.clone();
        let mut quot = vec![S::zero(); self.c.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let f = rem.leading().unwrap().try_div(dl)?;
            let shift = rd - dd;
            quot[shift] = f.clone();
            let sub = d.scale(&f).shift_up(shift);
            rem = rem - sub;
        }
        Some((Poly { c: quot }.normalized(), rem))
    }
}

impl<S: Ring> Add for Poly<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.c.len().max(rhs.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(S::zero);
            let b = rhs.c.get(i).cloned().unwrap_or_else(S::zero);
            c.push(a + b);
        }
        Poly { c }.normalized()
    }
}

impl<S: Ring> Sub for Poly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Ring> Neg for Poly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly { c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl<S: Ring> Mul for Poly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut c = vec![S::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly { c }.normalized()
    }
}
