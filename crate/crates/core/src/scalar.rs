//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All matrices are `DMatrix<Complex<T>>` for some real field `T`. The
//! decompositions come from nalgebra, which is itself generic over
//! [`RealField`], so the whole crate compiles for `f32` and `f64`.
//! Tolerances and literal constants are written as `f64` and converted
//! with [`lit`].

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type usable as the field of a complex matrix.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Display
    + LowerExp
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon of the type.
    fn epsilon() -> Self;
    /// Smallest positive normal value.
    fn min_positive() -> Self;
    fn infinity() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }

    fn min_positive() -> Self {
        f32::MIN_POSITIVE
    }

    fn infinity() -> Self {
        f32::INFINITY
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn min_positive() -> Self {
        f64::MIN_POSITIVE
    }

    fn infinity() -> Self {
        f64::INFINITY
    }
}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

/// Dense complex matrix; the universal operator representation.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

/// Dense complex column vector.
pub type ComplexVector<T> = DVector<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a `T` into `f64` for reporting and serialization.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Builds a complex scalar from two `f64` parts.
#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

/// Complex scalar with zero imaginary part.
#[inline]
pub fn real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// Modulus `|z|`.
#[inline]
pub fn modulus<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

/// `z / |z|`, with the convention `phase(0) = 1`.
#[inline]
pub fn phase<T: Real>(z: Cx<T>) -> Cx<T> {
    let m = modulus(z);
    if m == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        Complex::new(z.re / m, z.im / m)
    }
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    let r = modulus(z);
    let two = lit::<T>(2.0);
    let re = ((r + z.re) / two).max(T::zero()).sqrt();
    let im = ((r - z.re) / two).max(T::zero()).sqrt();
    Complex::new(re, if z.im < T::zero() { -im } else { im })
}

/// `exp(i·theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// True when every entry of the matrix is finite.
pub fn all_finite<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csqrt_is_principal_branch() {
        for (re, im) in [(4.0, 0.0), (-4.0, 0.0), (0.0, 2.0), (-3.0, -4.0), (1e-300, 0.0)] {
            let z: Complex<f64> = Complex::new(re, im);
            let r = csqrt(z);
            assert!((r * r - z).norm() <= 1e-15 * z.norm().max(1.0));
            assert!(r.re >= 0.0);
            assert!((r - z.sqrt()).norm() <= 1e-15 * z.norm().sqrt().max(1.0));
        }
    }

    #[test]
    fn phase_of_zero_is_one() {
        assert_eq!(phase(Complex::new(0.0f64, 0.0)), Complex::new(1.0, 0.0));
        assert_eq!(phase(Complex::new(0.0f32, -2.0)), Complex::new(0.0, -1.0));
    }
}
