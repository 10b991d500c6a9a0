//! Rank-one perturbations `N + a·(U v)⊗v` of a diagonal normal `N` by a
//! diagonal unitary `U = diag(θ)`.
//!
//! Identifying `(Cⁿ, v)` with `(L²(μ), 1)` for the atomic measure with
//! masses `|vᵢ|²`, the map `f ↦ θ·conj(f)` becomes `s = diag(θᵢ·vᵢ²/|vᵢ|²)`.

use nalgebra::DVector;
use num_complex::Complex;

use crate::conjugation::{csym_residual, Conjugation};
use crate::error::{Error, Result};
use crate::scalar::{modulus, phase, ComplexMatrix, ComplexVector, Cx, Real};
use crate::tolerance::Tolerance;

/// `diag(θᵢ·vᵢ²/|vᵢ|²)`, with `1` at zero coordinates (those decouple).
pub(crate) fn rank_one_conjugation<T: Real>(theta: &[Cx<T>], v: &ComplexVector<T>) -> Conjugation<T> {
    let diag: Vec<Cx<T>> = theta
        .iter()
        .zip(v.iter())
        .map(|(&th, &vi)| {
            if vi == Complex::new(T::zero(), T::zero()) {
                Complex::new(T::one(), T::zero())
            } else {
                let p = phase(vi);
                th * p * p
            }
        })
        .collect();
    Conjugation::from_exact(ComplexMatrix::from_diagonal(&DVector::from_vec(diag)))
}

/// Builds `t = diag(λ) + a·(diag(θ)·v)⊗v` and its conjugation.
pub fn normal_rank_one<T: Real>(
    eigs: &[Cx<T>],
    theta: &[Cx<T>],
    a: Cx<T>,
    v: &ComplexVector<T>,
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, Conjugation<T>)> {
    let n = eigs.len();
    if theta.len() != n || v.len() != n {
        return Err(Error::LengthMismatch);
    }
    for (i, th) in theta.iter().enumerate() {
        if (modulus(*th) - T::one()).abs() > tol.rel {
            return Err(Error::InvalidParams(format!("theta[{i}] is not unimodular")));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = T::one().max(modulus(eigs[i])).max(modulus(eigs[j]));
            if modulus(eigs[i] - eigs[j]) <= tol.rel * scale {
                return Err(Error::RepeatedEigenvalue(i, j));
            }
        }
    }
    if let Some(i) = v.iter().position(|&x| modulus(x) <= tol.abs) {
        return Err(Error::ZeroCoordinate(i));
    }
    let uv = DVector::from_iterator(n, theta.iter().zip(v.iter()).map(|(&th, &x)| th * x));
    let t = ComplexMatrix::from_diagonal(&DVector::from_column_slice(eigs)) + (uv * v.adjoint()) * a;
    let c = rank_one_conjugation(theta, v);
    csym_residual(&t, &c)?;
    Ok((t, c))
}
