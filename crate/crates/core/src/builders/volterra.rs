//! Discretized Volterra operator `[Vf](x) = ∫₀ˣ f(y) dy` on `[0, 1]`.
//!
//! The lower-triangular rule with `h/2` on the diagonal makes `V + V*`
//! exactly `h·𝟙𝟙ᵀ` and the flip `J Vᵀ J` exactly `V`, at every `n`.

use num_complex::Complex;

use crate::conjugation::{canonical_conjugation, CanonicalKind, Conjugation};
use crate::error::{Error, Result};
use crate::scalar::{lit, ComplexMatrix, Real};

pub fn volterra_discretize<T: Real>(n: usize) -> Result<(ComplexMatrix<T>, Conjugation<T>)> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("need n >= 2, got {n}")));
    }
    let h = T::one() / lit::<T>(n as f64);
    let half = h / lit::<T>(2.0);
    let v = ComplexMatrix::from_fn(n, n, |i, j| {
        let x = if j < i {
            h
        } else if j == i {
            half
        } else {
            T::zero()
        };
        Complex::new(x, T::zero())
    });
    Ok((v, canonical_conjugation(&CanonicalKind::Flip, n)?))
}
