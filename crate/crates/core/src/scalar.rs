//! Scalar backends.
//!
//! Every algebraic routine in this crate is generic over [`Scalar`], which is
//! implemented for single- and double-precision complex floats and for exact
//! Gaussian rationals (`Complex<BigRational>`). Float scalars are only ever
//! compared against zero through an explicit tolerance; exact scalars compare
//! exactly and ignore tolerances.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Num, ToPrimitive, Zero};

/// Real component type of a floating complex scalar.
pub trait FloatReal: Float + Debug + Send + Sync + 'static {
    /// Relative tolerance used when the caller does not supply one.
    const DEFAULT_TOL: f64;
}

impl FloatReal for f32 {
    const DEFAULT_TOL: f64 = 1e-4;
}

impl FloatReal for f64 {
    const DEFAULT_TOL: f64 = 1e-10;
}

/// A field element usable as a matrix entry or algebra coordinate.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Send + Sync + 'static {
    /// `true` for backends whose field operations never round.
    const EXACT: bool;

    /// Default relative zero threshold (0 for exact backends).
    fn default_tol() -> f64;

    /// Modulus as an `f64`; approximate for exact backends.
    fn modulus(&self) -> f64;

    /// Conversion to a double-precision complex number.
    fn to_c64(&self) -> Complex<f64>;

    fn from_i64(v: i64) -> Self;

    fn conj(&self) -> Self;

    /// Zero test. Exact backends ignore `threshold`.
    fn is_negligible(&self, threshold: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= threshold
        }
    }
}

impl<F: FloatReal> Scalar for Complex<F> {
    const EXACT: bool = false;

    fn default_tol() -> f64 {
        F::DEFAULT_TOL
    }

    fn modulus(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(F::from(v).expect("integer fits in float"), F::zero())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for Complex<BigRational> {
    const EXACT: bool = true;

    fn default_tol() -> f64 {
        0.0
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Builds an exact scalar `p/q` (real).
pub fn rational(p: i64, q: i64) -> Complex<BigRational> {
    Complex::new(
        BigRational::new(BigInt::from(p), BigInt::from(q)),
        BigRational::zero(),
    )
}

/// Max modulus over a slice of scalars.
pub fn max_modulus<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(Scalar::modulus).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zero_test_ignores_threshold() {
        let tiny = Complex::new(
            BigRational::new(BigInt::from(1), BigInt::from(10).pow(40)),
            BigRational::zero(),
        );
        assert!(!tiny.is_negligible(1.0));
        assert!(Complex::<BigRational>::zero().is_negligible(0.0));
    }

    #[test]
    fn float_zero_test_uses_threshold() {
        let z = Complex::new(1e-12, 0.0);
        assert!(z.is_negligible(1e-10));
        assert!(!z.is_negligible(1e-13));
    }

    #[test]
    fn rational_converts_to_float() {
        let q = rational(-3, 4);
        assert_eq!(q.to_c64(), Complex::new(-0.75, 0.0));
        assert_eq!(Complex::<f32>::from_i64(3).to_c64(), Complex::new(3.0, 0.0));
    }
}
