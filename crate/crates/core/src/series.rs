//! Truncated power series, log-extended series, and dense polynomials.
//!
//! `TruncatedSeries` holds c_0..c_{M-1} over a [`Scalar`] ring; M is the
//! truncation order, so the series is known modulo t^M. Binary operations
//! truncate to the smaller order of the two operands. `LogSeries` is a
//! finite sum SUM_j P_j(t) * (log t)^j used for Frobenius solution bases,
//! with theta acting as theta(P L^j) = theta(P) L^j + j P L^(j-1).
//! `Poly` is a dense polynomial used for operator coefficients.

use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;
use std::ops::{Add, Mul, Neg, Sub};

/// A power series known modulo t^M, stored as its M coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> TruncatedSeries<C> {
    /// Builds a series from coefficients; the truncation order is their count.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be at least 1");
        TruncatedSeries { coeffs }
    }

    pub fn zero_series(order: usize) -> Self {
        assert!(order >= 1);
        TruncatedSeries {
            coeffs: vec![C::zero(); order],
        }
    }

    pub fn one_series(order: usize) -> Self {
        Self::monomial(order, 0, C::one())
    }

    /// The series t itself (requires order >= 2).
    pub fn t_series(order: usize) -> Self {
        Self::monomial(order, 1, C::one())
    }

    /// c * t^k as a series of the given order.
    pub fn monomial(order: usize, k: usize, c: C) -> Self {
        assert!(k < order, "monomial degree {} exceeds order {}", k, order);
        let mut coeffs = vec![C::zero(); order];
        coeffs[k] = c;
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    /// Coefficient of t^i, zero beyond the truncation order.
    pub fn coeff_or_zero(&self, i: usize) -> C {
        if i < self.coeffs.len() {
            self.coeffs[i].clone()
        } else {
            C::zero()
        }
    }

    pub fn set_coeff(&mut self, i: usize, c: C) {
        self.coeffs[i] = c;
    }

    pub fn is_zero_series(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Restriction to a smaller truncation order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(
            1 <= order && order <= self.coeffs.len(),
            "cannot extend truncation order {} to {}",
            self.coeffs.len(),
            order
        );
        TruncatedSeries {
            coeffs: self.coeffs[..order].to_vec(),
        }
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        TruncatedSeries {
            coeffs: (0..n)
                .map(|i| self.coeffs[i].clone() + other.coeffs[i].clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        TruncatedSeries {
            coeffs: (0..n)
                .map(|i| self.coeffs[i].clone() - other.coeffs[i].clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.scale(&C::from_i64(n))
    }

    /// theta = t d/dt: multiplies c_m by m.
    pub fn theta(&self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c.mul_i64(m as i64))
                .collect(),
        }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn try_inv(&self) -> Result<Self> {
        Self::one_series(self.order()).div(self)
    }

    /// Power-series long division; the divisor needs a unit constant term.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let n = self.common_order(other);
        let c0inv = other.coeffs[0].try_inv().ok_or_else(|| {
            Error::NotInvertible(format!(
                "series division needs a unit constant term, got {:?}",
                other.coeffs[0]
            ))
        })?;
        let mut out = vec![C::zero(); n];
        for m in 0..n {
            let mut acc = self.coeffs[m].clone();
            for k in 0..m {
                if !out[k].is_zero() {
                    acc = acc - out[k].clone() * other.coeffs[m - k].clone();
                }
            }
            out[m] = acc * c0inv.clone();
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// exp(a) for a series with a(0) = 0, via m e_m = SUM k a_k e_{m-k}.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidInput(
                "exp needs a vanishing constant term".into(),
            ));
        }
        let n = self.order();
        let mut e = vec![C::zero(); n];
        e[0] = C::one();
        for m in 1..n {
            let mut acc = C::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc + self.coeffs[k].mul_i64(k as i64) * e[m - k].clone();
                }
            }
            e[m] = acc.exact_div_i64(m as i64).ok_or_else(|| {
                Error::NotInvertible(format!("coefficient ring cannot divide by {}", m))
            })?;
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    /// log(a) for a series with a(0) = 1, via l_m = [t^m](theta a / a) / m.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidInput(
                "log needs constant term 1".into(),
            ));
        }
        let d = self.theta().div(self)?;
        let mut l = vec![C::zero(); self.order()];
        for m in 1..self.order() {
            l[m] = d.coeffs[m].exact_div_i64(m as i64).ok_or_else(|| {
                Error::NotInvertible(format!("coefficient ring cannot divide by {}", m))
            })?;
        }
        Ok(TruncatedSeries { coeffs: l })
    }

    /// Substitution self(inner) for inner with vanishing constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidInput(
                "composition needs inner constant term 0".into(),
            ));
        }
        let n = self.common_order(inner);
        // Horner evaluation: result = (..(c_{n-1} inner + c_{n-2}) inner..).
        let mut out = TruncatedSeries::monomial(n, 0, self.coeffs[n - 1].clone());
        for i in (0..n - 1).rev() {
            out = out.mul(&inner.truncated(n));
            out.coeffs[0] = self.coeffs[i].clone();
        }
        Ok(out)
    }

    /// Compositional inverse of a series with a(0) = 0 and a'(0) a unit:
    /// the unique s with a(s(q)) = q mod q^M.
    pub fn revert(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidInput(
                "reversion needs a vanishing constant term".into(),
            ));
        }
        let n = self.order();
        let c1inv = self.coeffs[1].try_inv().ok_or_else(|| {
            Error::NotInvertible("reversion needs a unit linear coefficient".into())
        })?;
        let mut s = TruncatedSeries::zero_series(n);
        if n >= 2 {
            s.coeffs[1] = c1inv.clone();
        }
        // With s correct mod q^m, a(s) = q + e q^m + O(q^(m+1)); the degree-m
        // correction is -e/a'(0).
        for m in 2..n {
            let comp = self.truncated(m + 1).compose(&s.truncated(m + 1))?;
            let e = comp.coeffs[m].clone();
            if !e.is_zero() {
                s.coeffs[m] = -(e * c1inv.clone());
            }
        }
        Ok(s)
    }

    /// Substitution t -> t^k, truncated at `order`.
    pub fn stretch(&self, k: usize, order: usize) -> Self {
        assert!(k >= 1);
        let mut out = vec![C::zero(); order];
        for (i, c) in self.coeffs.iter().enumerate() {
            match i.checked_mul(k) {
                Some(j) if j < order => out[j] = c.clone(),
                _ => break,
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplication by t^k, truncated at `order`.
    pub fn shift_mul_t(&self, k: usize, order: usize) -> Self {
        let mut out = vec![C::zero(); order];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k < order {
                out[i + k] = c.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Exact division by t^k; the first k coefficients must vanish.
    /// The truncation order drops by k.
    pub fn shift_div_t(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.order() <= k {
            return Err(Error::InsufficientTruncation(format!(
                "cannot divide an order-{} series by t^{}",
                self.order(),
                k
            )));
        }
        for i in 0..k {
            if !self.coeffs[i].is_zero() {
                return Err(Error::DivisibilityFailure(format!(
                    "coefficient of t^{} is nonzero under division by t^{}",
                    i, k
                )));
            }
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }
}

impl<C: Scalar> Add for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, other: Self) -> TruncatedSeries<C> {
        TruncatedSeries::add(self, other)
    }
}

impl<C: Scalar> Sub for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, other: Self) -> TruncatedSeries<C> {
        TruncatedSeries::sub(self, other)
    }
}

impl<C: Scalar> Mul for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, other: Self) -> TruncatedSeries<C> {
        TruncatedSeries::mul(self, other)
    }
}

impl<C: Scalar> Neg for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn neg(self) -> TruncatedSeries<C> {
        TruncatedSeries::neg(self)
    }
}

/// A finite sum SUM_j P_j(t) (log t)^j with all parts at one truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeries<C> {
    parts: Vec<TruncatedSeries<C>>,
}

impl<C: Scalar> LogSeries<C> {
    pub fn from_parts(parts: Vec<TruncatedSeries<C>>) -> Self {
        assert!(!parts.is_empty());
        let order = parts[0].order();
        assert!(
            parts.iter().all(|p| p.order() == order),
            "log-series parts must share one truncation order"
        );
        LogSeries { parts }
    }

    pub fn from_series(s: TruncatedSeries<C>) -> Self {
        LogSeries { parts: vec![s] }
    }

    /// Number of parts minus one: the highest power of log t present.
    pub fn log_degree(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn order(&self) -> usize {
        self.parts[0].order()
    }

    pub fn parts(&self) -> &[TruncatedSeries<C>] {
        &self.parts
    }

    pub fn part(&self, j: usize) -> &TruncatedSeries<C> {
        &self.parts[j]
    }

    /// Coefficient of t^m (log t)^j; zero for j beyond the log degree.
    pub fn coeff(&self, j: usize, m: usize) -> C {
        if j < self.parts.len() {
            self.parts[j].coeff_or_zero(m)
        } else {
            C::zero()
        }
    }

    pub fn is_zero_series(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero_series())
    }

    fn padded(&self, len: usize, order: usize) -> Vec<TruncatedSeries<C>> {
        let mut v: Vec<_> = self.parts.iter().map(|p| p.truncated(order)).collect();
        while v.len() < len {
            v.push(TruncatedSeries::zero_series(order));
        }
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let order = self.order().min(other.order());
        let a = self.padded(len, order);
        let b = other.padded(len, order);
        LogSeries {
            parts: (0..len).map(|j| a[j].add(&b[j])).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LogSeries {
            parts: self.parts.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        LogSeries {
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul_series(&self, s: &TruncatedSeries<C>) -> Self {
        LogSeries {
            parts: self.parts.iter().map(|p| p.mul(s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let len = self.parts.len() + other.parts.len() - 1;
        let mut parts = vec![TruncatedSeries::zero_series(order); len];
        for (i, a) in self.parts.iter().enumerate() {
            for (j, b) in other.parts.iter().enumerate() {
                parts[i + j] = parts[i + j].add(&a.mul(b));
            }
        }
        LogSeries { parts }
    }

    /// theta = t d/dt with theta(log t) = 1:
    /// theta(P L^j) = theta(P) L^j + j P L^(j-1).
    pub fn theta(&self) -> Self {
        let mut parts: Vec<TruncatedSeries<C>> =
            self.parts.iter().map(|p| p.theta()).collect();
        for j in 1..self.parts.len() {
            let carried = self.parts[j].mul_i64(j as i64);
            parts[j - 1] = parts[j - 1].add(&carried);
        }
        LogSeries { parts }
    }

    /// Frobenius substitution t -> t^p: parts[j] becomes p^j * parts[j](t^p),
    /// truncated at the original order.
    pub fn frobenius_substitute(&self, p: usize) -> Self {
        let order = self.order();
        LogSeries {
            parts: self
                .parts
                .iter()
                .enumerate()
                .map(|(j, pj)| {
                    let mut s = pj.stretch(p, order);
                    let mut factor = 1i64;
                    for _ in 0..j {
                        factor *= p as i64;
                    }
                    if factor != 1 {
                        s = s.mul_i64(factor);
                    }
                    s
                })
                .collect(),
        }
    }

    /// Drops trailing all-zero parts (keeping at least one).
    pub fn trimmed(&self) -> Self {
        let mut len = self.parts.len();
        while len > 1 && self.parts[len - 1].is_zero_series() {
            len -= 1;
        }
        LogSeries {
            parts: self.parts[..len].to_vec(),
        }
    }
}

/// A dense polynomial with no trailing zeros; the empty vector is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> Poly<C> {
    pub fn from_coeffs(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero_poly() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: C) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(k: usize, c: C) -> Self {
        if c.is_zero() {
            return Self::zero_poly();
        }
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> C {
        if i < self.coeffs.len() {
            self.coeffs[i].clone()
        } else {
            C::zero()
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval0(&self) -> C {
        self.coeff(0)
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero_poly() || other.is_zero_poly() {
            return Self::zero_poly();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.scale(&C::from_i64(n))
    }

    /// theta = t d/dt on polynomials in t.
    pub fn theta(&self) -> Self {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c.mul_i64(m as i64))
                .collect(),
        )
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn to_series(&self, order: usize) -> TruncatedSeries<C> {
        let mut s = TruncatedSeries::zero_series(order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i < order {
                s.set_coeff(i, c.clone());
            }
        }
        s
    }
}
