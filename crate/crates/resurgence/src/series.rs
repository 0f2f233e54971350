//! Truncated formal series in z^{-1} and their Borel transforms.
//!
//! A series is stored as a constant term `c` plus the coefficients
//! `a_0..a_N` of `sum a_n z^{-n-1}`. The constant is kept outside the
//! Borel-transformable part. Every binary operation propagates the minimum
//! valid truncation order; reading a coefficient beyond it is an error,
//! never a silent zero.

use crate::error::{Error, Result};
use crate::scalar::{bernoulli_numbers, factorial, Scalar};

/// `c + sum_{n=0..=N} a_n z^{-n-1}`, valid through order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    constant: S,
    coeffs: Vec<S>,
}

/// Taylor coefficients `b_0..b_N` of the Borel transform, `b_n = a_n / n!`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// Build from a constant term and the coefficients `a_0..a_N`.
    pub fn new(constant: S, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least order 0");
        TruncatedSeries { constant, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            constant: S::zero(),
            coeffs: vec![S::zero(); order + 1],
        }
    }

    pub fn constant_series(c: S, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.constant = c;
        s
    }

    /// The monomial `z^{-k-1}`.
    pub fn monomial(k: usize, order: usize) -> Self {
        assert!(k <= order);
        let mut s = Self::zero(order);
        s.coeffs[k] = S::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant(&self) -> &S {
        &self.constant
    }

    pub fn has_constant_term(&self) -> bool {
        !self.constant.is_zero()
    }

    /// Coefficient of `z^{-n-1}`; reads beyond the valid order are errors.
    pub fn coeff(&self, n: usize) -> Result<&S> {
        self.coeffs.get(n).ok_or(Error::OrderExceeded {
            requested: n,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Copy truncated to order `n <= N`.
    pub fn truncated(&self, n: usize) -> Self {
        assert!(n <= self.order());
        TruncatedSeries {
            constant: self.constant.clone(),
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(|a| a.is_zero())
    }

    /// Drop the constant term.
    pub fn without_constant(&self) -> Self {
        TruncatedSeries {
            constant: S::zero(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        TruncatedSeries {
            constant: self.constant.clone() * k.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * k.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            constant: self.constant.clone() + other.constant.clone(),
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].clone() + other.coeffs[k].clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            constant: -self.constant.clone(),
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    /// Cauchy product `(c1 + sum a1_k z^{-k-1})(c2 + sum a2_k z^{-k-1})`,
    /// truncated at the minimum of the two valid orders.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.constant.clone() * other.coeffs[m].clone()
                + other.constant.clone() * self.coeffs[m].clone();
            // z^{-p-1} * z^{-q-1} = z^{-(p+q+1)-1}
            if m >= 1 {
                for p in 0..m {
                    let q = m - 1 - p;
                    acc = acc + self.coeffs[p].clone() * other.coeffs[q].clone();
                }
            }
            coeffs.push(acc);
        }
        TruncatedSeries {
            constant: self.constant.clone() * other.constant.clone(),
            coeffs,
        }
    }

    /// `d/dz`: `z^{-n-1}` maps to `-(n+1) z^{-n-2}`. All output coefficients
    /// through order `N+1` are determined by the input, so the derivative is
    /// returned at order `N+1` with no inexact entries.
    pub fn derive(&self) -> Self {
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 2);
        coeffs.push(S::zero());
        for m in 1..=(n + 1) {
            coeffs.push(-S::from_integer(m as i64) * self.coeffs[m - 1].clone());
        }
        TruncatedSeries {
            constant: S::zero(),
            coeffs,
        }
    }

    /// `d/dz` truncated back to the input order.
    pub fn derive_same_order(&self) -> Self {
        self.derive().truncated(self.order())
    }

    /// Formal Borel transform of the `z^{-1}`-part; the constant term is
    /// reported alongside, never folded in.
    pub fn borel(&self) -> (BorelSeries<S>, S) {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut fact = S::one();
        for (n, a) in self.coeffs.iter().enumerate() {
            if n > 0 {
                fact = fact * S::from_integer(n as i64);
            }
            coeffs.push(a.clone() / fact.clone());
        }
        (BorelSeries { coeffs }, self.constant.clone())
    }

    /// Partial sum `c + sum_{n<=N} a_n z^{-n-1}` at a point, in f64.
    pub fn eval_partial_sum(&self, z: num::complex::Complex64) -> num::complex::Complex64 {
        let zinv = 1.0 / z;
        let mut acc = self.constant.to_c64();
        let mut p = zinv;
        for a in &self.coeffs {
            acc += a.to_c64() * p;
            p *= zinv;
        }
        acc
    }

    /// Pointwise conversion to float coefficients.
    pub fn to_float(&self) -> TruncatedSeries<num::complex::Complex64> {
        TruncatedSeries {
            constant: self.constant.to_c64(),
            coeffs: self.coeffs.iter().map(|a| a.to_c64()).collect(),
        }
    }
}

impl<S: Scalar> BorelSeries<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        BorelSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&S> {
        self.coeffs.get(n).ok_or(Error::OrderExceeded {
            requested: n,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Inverse Borel transform: `a_n = b_n * n!`, with the constant term
    /// reattached. Exact round trip in exact mode.
    pub fn inverse_borel(&self, constant: S) -> TruncatedSeries<S> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut fact = S::one();
        for (n, b) in self.coeffs.iter().enumerate() {
            if n > 0 {
                fact = fact * S::from_integer(n as i64);
            }
            coeffs.push(b.clone() * fact.clone());
        }
        TruncatedSeries {
            constant,
            coeffs,
        }
    }

    /// Formal convolution on the Borel side:
    /// `(b1 * b2)_n = sum_{p+q=n-1} b1_p b2_q p! q! / n!`, the Borel image of
    /// the Cauchy product of the constant-free parts.
    pub fn formal_convolution(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(S::zero());
        for m in 1..=n {
            let mut acc = S::zero();
            for p in 0..m {
                let q = m - 1 - p;
                acc = acc
                    + self.coeffs[p].clone()
                        * other.coeffs[q].clone()
                        * factorial::<S>(p)
                        * factorial::<S>(q)
                        / factorial::<S>(m);
            }
            coeffs.push(acc);
        }
        BorelSeries { coeffs }
    }

    pub fn to_float(&self) -> BorelSeries<num::complex::Complex64> {
        BorelSeries {
            coeffs: self.coeffs.iter().map(|b| b.to_c64()).collect(),
        }
    }

    /// Evaluate the Taylor polynomial at `zeta`, in f64.
    pub fn eval_poly(&self, zeta: num::complex::Complex64) -> num::complex::Complex64 {
        let mut acc = num::complex::Complex64::new(0.0, 0.0);
        for b in self.coeffs.iter().rev() {
            acc = acc * zeta + b.to_c64();
        }
        acc
    }
}

/// Euler series `sum (-1)^n n! z^{-n-1}`; its Borel transform is `1/(1+zeta)`.
pub fn euler_series<S: Scalar>(order: usize) -> TruncatedSeries<S> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut fact = S::one();
    for n in 0..=order {
        if n > 0 {
            fact = fact * S::from_integer(n as i64);
        }
        let sign = if n % 2 == 0 { S::one() } else { -S::one() };
        coeffs.push(sign * fact.clone());
    }
    TruncatedSeries::new(S::zero(), coeffs)
}

/// Stirling series `sum_{k>=1} B_{2k}/(2k(2k-1)) z^{-2k+1}`; its Borel
/// transform is `zeta^{-2} (zeta/2 coth zeta/2 - 1)`.
pub fn stirling_series<S: Scalar>(order: usize) -> TruncatedSeries<S> {
    // z^{-2k+1} = z^{-n-1} with n = 2k-2.
    let kmax = order / 2 + 1;
    let bern = bernoulli_numbers::<S>(2 * kmax);
    let mut coeffs = vec![S::zero(); order + 1];
    for k in 1..=kmax {
        let n = 2 * k - 2;
        if n <= order {
            coeffs[n] = bern[2 * k].clone()
                / (S::from_integer(2 * k as i64) * S::from_integer((2 * k - 1) as i64));
        }
    }
    TruncatedSeries::new(S::zero(), coeffs)
}

/// Series with Borel transform `1/(1-zeta)`: `a_n = n!`.
pub fn geometric_series<S: Scalar>(order: usize) -> TruncatedSeries<S> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut fact = S::one();
    for n in 0..=order {
        if n > 0 {
            fact = fact * S::from_integer(n as i64);
        }
        coeffs.push(fact.clone());
    }
    TruncatedSeries::new(S::zero(), coeffs)
}
