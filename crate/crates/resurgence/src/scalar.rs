//! Coefficient fields for truncated series: exact rational-complex and
//! double-precision complex.
//!
//! All algebraic identities (group laws, residuals, round-trips) are certified
//! in exact mode, where `n!` never overflows; float mode feeds the analytic
//! machinery (germ evaluation, quadrature, Laplace sums).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::ToPrimitive;
use num::Complex;
use num::{One, Zero};

/// Exact complex scalar: a pair of arbitrary-precision rationals.
pub type ExactComplex = Complex<BigRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    Exact,
    Float,
}

/// A coefficient field for truncated series arithmetic.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn mode() -> ScalarMode;

    fn from_integer(n: i64) -> Self;

    /// Exact ratio `num/den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy view as a double-precision complex number.
    fn to_c64(&self) -> Complex64;

    /// Equality up to `tol` in float mode, bit-exact equality in exact mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for Complex64 {
    fn mode() -> ScalarMode {
        ScalarMode::Float
    }

    fn from_integer(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

impl Scalar for ExactComplex {
    fn mode() -> ScalarMode {
        ScalarMode::Exact
    }

    fn from_integer(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// `n!` in the coefficient field.
pub fn factorial<S: Scalar>(n: usize) -> S {
    let mut acc = S::one();
    for k in 2..=n {
        acc = acc * S::from_integer(k as i64);
    }
    acc
}

/// Exact ratio of factorials `a! / b!` with `a >= b`, as a scalar.
pub fn falling_factorial_ratio<S: Scalar>(a: usize, b: usize) -> S {
    assert!(a >= b);
    let mut acc = S::one();
    for k in (b + 1)..=a {
        acc = acc * S::from_integer(k as i64);
    }
    acc
}

/// Binomial coefficient as a scalar.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut num = S::one();
    let mut den = S::one();
    for j in 0..k {
        num = num * S::from_integer((n - j) as i64);
        den = den * S::from_integer((j + 1) as i64);
    }
    num / den
}

/// Bernoulli numbers `B_0..=B_n` (B_1 = -1/2 convention) by the standard
/// recurrence `sum_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers<S: Scalar>(n: usize) -> Vec<S> {
    let mut b: Vec<S> = Vec::with_capacity(n + 1);
    b.push(S::one());
    for m in 1..=n {
        let mut acc = S::zero();
        for (j, bj) in b.iter().enumerate() {
            acc = acc + binomial::<S>(m + 1, j) * bj.clone();
        }
        let bm = -acc / S::from_integer((m + 1) as i64);
        b.push(bm);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_exact_and_float() {
        assert_eq!(factorial::<ExactComplex>(5), ExactComplex::from_integer(120));
        assert_eq!(factorial::<Complex64>(5).re, 120.0);
    }

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_numbers::<ExactComplex>(8);
        assert_eq!(b[0], ExactComplex::from_integer(1));
        assert_eq!(b[1], ExactComplex::from_ratio(-1, 2));
        assert_eq!(b[2], ExactComplex::from_ratio(1, 6));
        assert_eq!(b[3], ExactComplex::zero());
        assert_eq!(b[4], ExactComplex::from_ratio(-1, 30));
        assert_eq!(b[6], ExactComplex::from_ratio(1, 42));
        assert_eq!(b[8], ExactComplex::from_ratio(-1, 30));
    }

    #[test]
    fn binomial_matches_pascal() {
        for n in 0..10usize {
            for k in 0..=n {
                let direct: ExactComplex = binomial(n, k);
                let pascal = if k == 0 || k == n {
                    ExactComplex::one()
                } else {
                    binomial::<ExactComplex>(n - 1, k - 1) + binomial::<ExactComplex>(n - 1, k)
                };
                assert_eq!(direct, pascal);
            }
        }
    }
}
