//! Poisson series: truncated power series in a small parameter whose
//! coefficients are real trigonometric polynomials in `τ = ωt`.

use crate::algebra::Field;

/// `Σ_k cos[k] cos kτ + Σ_{k≥1} sin[k] sin kτ`; `sin[0]` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Trig<T> {
    pub cos: Vec<T>,
    pub sin: Vec<T>,
}

impl<T: Field> Trig<T> {
    pub fn zero() -> Self {
        Trig { cos: Vec::new(), sin: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::cos_term(0, c)
    }

    /// `c cos kτ`.
    pub fn cos_term(k: usize, c: T) -> Self {
        let mut t = Self::zero();
        t.add_cos(k, c);
        t
    }

    /// `c sin kτ`.
    pub fn sin_term(k: usize, c: T) -> Self {
        let mut t = Self::zero();
        t.add_sin(k as i64, c);
        t
    }

    fn add_cos(&mut self, k: usize, c: T) {
        if self.cos.len() <= k {
            self.cos.resize(k + 1, T::zero());
        }
        self.cos[k] = self.cos[k].clone() + c;
    }

    /// Adds `c sin kτ` for any integer `k`.
    fn add_sin(&mut self, k: i64, c: T) {
        if k == 0 {
            return;
        }
        let (k, c) = if k < 0 { ((-k) as usize, -c) } else { (k as usize, c) };
        if self.sin.len() <= k {
            self.sin.resize(k + 1, T::zero());
        }
        self.sin[k] = self.sin[k].clone() + c;
    }

    pub fn cos_coeff(&self, k: usize) -> T {
        self.cos.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn sin_coeff(&self, k: usize) -> T {
        if k == 0 {
            return T::zero();
        }
        self.sin.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Highest harmonic with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        let c = self.cos.iter().rposition(|v| !v.is_zero()).unwrap_or(0);
        let s = self.sin.iter().rposition(|v| !v.is_zero()).unwrap_or(0);
        c.max(s)
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|v| v.is_zero())
    }

    /// Mean over a period.
    pub fn mean(&self) -> T {
        self.cos_coeff(0)
    }

    pub fn scale(&self, c: &T) -> Self {
        Trig {
            cos: self.cos.iter().map(|v| v.clone() * c.clone()).collect(),
            sin: self.sin.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.cos.iter().enumerate() {
            out.add_cos(k, v.clone());
        }
        for (k, v) in other.sin.iter().enumerate().skip(1) {
            out.add_sin(k as i64, v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let half = T::ratio(1, 2);
        let mut out = Self::zero();
        for (a, ca) in self.cos.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, cb) in other.cos.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let p = half.clone() * ca.clone() * cb.clone();
                out.add_cos(a.abs_diff(b), p.clone());
                out.add_cos(a + b, p);
            }
            for (b, sb) in other.sin.iter().enumerate().skip(1).filter(|(_, v)| !v.is_zero()) {
                let p = half.clone() * ca.clone() * sb.clone();
                out.add_sin((a + b) as i64, p.clone());
                out.add_sin(b as i64 - a as i64, p);
            }
        }
        for (a, sa) in self.sin.iter().enumerate().skip(1).filter(|(_, v)| !v.is_zero()) {
            for (b, cb) in other.cos.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let p = half.clone() * sa.clone() * cb.clone();
                out.add_sin((a + b) as i64, p.clone());
                out.add_sin(a as i64 - b as i64, p);
            }
            for (b, sb) in other.sin.iter().enumerate().skip(1).filter(|(_, v)| !v.is_zero()) {
                let p = half.clone() * sa.clone() * sb.clone();
                out.add_cos(a.abs_diff(b), p.clone());
                out.add_cos(a + b, -p);
            }
        }
        out
    }

    /// `d/dτ`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in self.cos.iter().enumerate().skip(1) {
            out.add_sin(k as i64, -(T::from_int(k as i64) * c.clone()));
        }
        for (k, s) in self.sin.iter().enumerate().skip(1) {
            out.add_cos(k, T::from_int(k as i64) * s.clone());
        }
        out
    }

    /// Zero-mean antiderivative in `τ`; the mean of `self` is ignored.
    pub fn antiderivative(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in self.cos.iter().enumerate().skip(1) {
            out.add_sin(k as i64, c.clone() / T::from_int(k as i64));
        }
        for (k, s) in self.sin.iter().enumerate().skip(1) {
            out.add_cos(k, -(s.clone() / T::from_int(k as i64)));
        }
        out
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Trig<U> {
        Trig { cos: self.cos.iter().map(&f).collect(), sin: self.sin.iter().map(&f).collect() }
    }
}

impl Trig<f64> {
    pub fn eval(&self, tau: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, c)| c * (k as f64 * tau).cos()).sum();
        let s: f64 = self.sin.iter().enumerate().skip(1).map(|(k, s)| s * (k as f64 * tau).sin()).sum();
        c + s
    }
}

/// `Σ_{n=0}^{K} s^n A_n(τ)`, known exactly through order `K = terms.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poisson<T> {
    pub terms: Vec<Trig<T>>,
}

impl<T: Field> Poisson<T> {
    pub fn zero(order: usize) -> Self {
        Poisson { terms: vec![Trig::zero(); order + 1] }
    }

    /// `a(τ) s^n` truncated at `order`.
    pub fn monomial(n: usize, a: Trig<T>, order: usize) -> Self {
        let mut p = Self::zero(order);
        if n <= order {
            p.terms[n] = a;
        }
        p
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, n: usize) -> Trig<T> {
        self.terms.get(n).cloned().unwrap_or_else(Trig::zero)
    }

    /// Mean over `τ` of every coefficient.
    pub fn mean(&self) -> Vec<T> {
        self.terms.iter().map(Trig::mean).collect()
    }

    pub fn scale(&self, c: &T) -> Self {
        Poisson { terms: self.terms.iter().map(|t| t.scale(c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Poisson { terms: (0..=k).map(|n| self.terms[n].add(&other.terms[n])).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let terms = (0..=k)
            .map(|n| (0..=n).fold(Trig::zero(), |acc, j| acc.add(&self.terms[j].mul(&other.terms[n - j]))))
            .collect();
        Poisson { terms }
    }

    pub fn derivative(&self) -> Self {
        Poisson { terms: self.terms.iter().map(Trig::derivative).collect() }
    }

    /// `1/self`; the leading coefficient must be a nonzero constant.
    pub fn inverse(&self) -> Self {
        let a0 = self.terms[0].mean();
        let inv0 = T::one() / a0;
        let mut out: Vec<Trig<T>> = vec![Trig::constant(inv0.clone())];
        for n in 1..=self.order() {
            let s = (1..=n).fold(Trig::zero(), |acc, j| acc.add(&self.terms[j].mul(&out[n - j])));
            out.push(s.scale(&-inv0.clone()));
        }
        Poisson { terms: out }
    }

    /// `√self` given the square root `root0` of the constant leading coefficient.
    pub fn sqrt_with(&self, root0: T) -> Self {
        let two_root = T::from_int(2) * root0.clone();
        let mut out: Vec<Trig<T>> = vec![Trig::constant(root0)];
        for n in 1..=self.order() {
            let cross = (1..n).fold(Trig::zero(), |acc, j| acc.add(&out[j].mul(&out[n - j])));
            let s = self.terms[n].sub(&cross);
            out.push(s.scale(&(T::one() / two_root.clone())));
        }
        Poisson { terms: out }
    }

    /// Re-indexes to a new truncation order, padding with zeros.
    pub fn truncate(&self, order: usize) -> Self {
        Poisson { terms: (0..=order).map(|n| self.term(n)).collect() }
    }
}

impl Poisson<f64> {
    /// Sum of the series at small parameter `s` and phase `τ`.
    pub fn eval(&self, s: f64, tau: f64) -> f64 {
        self.terms.iter().rev().fold(0.0, |acc, t| acc * s + t.eval(tau))
    }
}
