//! Truncated Laurent series in one variable with precision tracking.
//!
//! A value represents `x^val (c_0 + c_1 x + ...) + O(x^prec)`; exact values
//! (constants) carry no error term. Arithmetic propagates the error term the
//! same way a computer algebra system does, so every coefficient that is
//! reported is exact when the coefficient type is exact.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::algebra::{Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    val: i32,
    coeffs: Vec<T>,
    prec: Option<i32>,
}

/// Power series with exact rational coefficients.
pub type RationalSeries = Series<BigRational>;

impl<T: Ring> Series<T> {
    /// Exact constant.
    pub fn constant(c: T) -> Self {
        Self::new(0, vec![c], None)
    }

    /// The series variable `x + O(x^prec)`.
    pub fn var(prec: i32) -> Self {
        Self::new(1, vec![T::one()], Some(prec))
    }

    /// `O(x^prec)`.
    pub fn big_o(prec: i32) -> Self {
        Self::new(prec, Vec::new(), Some(prec))
    }

    /// Builds `x^val Σ c_k x^k + O(x^prec)`.
    pub fn new(val: i32, coeffs: Vec<T>, prec: Option<i32>) -> Self {
        let mut s = Series { val, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i32;
        }
        if let Some(p) = self.prec {
            let keep = (p - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.prec.unwrap_or(0);
        }
    }

    /// Lowest power with a nonzero coefficient (or the precision for `O(x^p)`).
    pub fn valuation(&self) -> i32 {
        self.val
    }

    /// Powers `>= precision` are unknown; `None` means exact.
    pub fn precision(&self) -> Option<i32> {
        self.prec
    }

    /// Coefficient of `x^k`; `None` if it lies beyond the known precision.
    pub fn coeff(&self, k: i32) -> Option<T> {
        if self.prec.is_some_and(|p| k >= p) {
            return None;
        }
        if k < self.val || k >= self.val + self.coeffs.len() as i32 {
            return Some(T::zero());
        }
        Some(self.coeffs[(k - self.val) as usize].clone())
    }

    /// Replaces the error term by `O(x^p)` if that is coarser.
    pub fn truncate(&self, p: i32) -> Self {
        let prec = Some(self.prec.map_or(p, |q| q.min(p)));
        Self::new(self.val, self.coeffs.clone(), prec)
    }

    /// Maps every known coefficient through `f`.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Series<U> {
        Series::new(self.val, self.coeffs.iter().map(f).collect(), self.prec)
    }

    fn min_prec(a: Option<i32>, b: Option<i32>) -> Option<i32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }
}

impl<T: Field> Series<T> {
    /// Multiplicative inverse; requires a nonzero leading coefficient.
    pub fn inverse(&self) -> Self {
        assert!(!self.coeffs.is_empty(), "inverse of an indeterminate zero series");
        let rel = match self.prec {
            Some(p) => p - self.val,
            None => {
                assert!(self.coeffs.len() == 1, "inverse of an exact polynomial needs a precision");
                1
            }
        };
        let a0 = self.coeffs[0].clone();
        let inv0 = T::one() / a0;
        let mut out: Vec<T> = Vec::with_capacity(rel as usize);
        for k in 0..rel as usize {
            if k == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut acc = T::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        let prec = self.prec.map(|_| -self.val + rel);
        Self::new(-self.val, out, prec)
    }
}

impl<T: Ring> Add for Series<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let val = self.val.min(rhs.val);
        let prec = Self::min_prec(self.prec, rhs.prec);
        let end = (self.val + self.coeffs.len() as i32).max(rhs.val + rhs.coeffs.len() as i32);
        let mut coeffs = vec![T::zero(); (end - val).max(0) as usize];
        for (i, c) in self.coeffs.into_iter().enumerate() {
            let k = (self.val - val) as usize + i;
            coeffs[k] = coeffs[k].clone() + c;
        }
        for (i, c) in rhs.coeffs.into_iter().enumerate() {
            let k = (rhs.val - val) as usize + i;
            coeffs[k] = coeffs[k].clone() + c;
        }
        Self::new(val, coeffs, prec)
    }
}

impl<T: Ring> Neg for Series<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Series { val: self.val, coeffs: self.coeffs.into_iter().map(|c| -c).collect(), prec: self.prec }
    }
}

impl<T: Ring> Sub for Series<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Ring> Mul for Series<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let val = self.val + rhs.val;
        let prec = Self::min_prec(self.prec.map(|p| p + rhs.val), rhs.prec.map(|p| p + self.val));
        let len = match prec {
            Some(p) => ((p - val).max(0) as usize).min(self.coeffs.len() + rhs.coeffs.len()),
            None => self.coeffs.len() + rhs.coeffs.len(),
        };
        let mut coeffs = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(val, coeffs, prec)
    }
}

impl<T: Field> Div for Series<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse()
    }
}

impl<T: Ring> Ring for Series<T> {
    fn zero() -> Self {
        Self::new(0, Vec::new(), None)
    }
    fn one() -> Self {
        Self::constant(T::one())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(T::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Field> Field for Series<T> {}
