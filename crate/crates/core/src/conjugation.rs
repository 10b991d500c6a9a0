//! Conjugations on `C^n` and the C-symmetry residual.
//!
//! A conjugation is a conjugate-linear isometric involution. On a
//! finite-dimensional space every such map has the form `x ↦ s·conj(x)`
//! with `s` symmetric and unitary, so a [`Conjugation`] stores `s` and
//! nothing else. `C² = I` becomes the matrix identity `s·conj(s) = I`,
//! which for unitary `s` is equivalent to `s = sᵀ`.
//!
//! An operator `t` is C-symmetric (`t = C t* C`) exactly when
//! `t·s = s·tᵀ`; [`csym_residual`] measures the failure of that identity.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, identity, require_square};
use crate::scalar::{all_finite, lit, to_f64, ComplexMatrix, ComplexVector, Real};
use crate::tolerance::Tolerance;

/// A validated conjugation `x ↦ s·conj(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation<T: Real> {
    s: ComplexMatrix<T>,
    unitarity_residual: T,
    symmetry_residual: T,
}

impl<T: Real> Conjugation<T> {
    /// Wraps `s` after computing its residuals, without thresholding.
    /// Only for matrices that are symmetric unitary by construction.
    pub(crate) fn from_exact(s: ComplexMatrix<T>) -> Self {
        let unitarity_residual = linalg::unitarity_residual(&s);
        let symmetry_residual = frobenius(&(&s - s.transpose()));
        Self {
            s,
            unitarity_residual,
            symmetry_residual,
        }
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// The symmetric unitary matrix representing the conjugation.
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.s
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.s
    }

    /// `‖s·s* − I‖_F`
    pub fn unitarity_residual(&self) -> T {
        self.unitarity_residual
    }

    /// `‖s − sᵀ‖_F`
    pub fn symmetry_residual(&self) -> T {
        self.symmetry_residual
    }

    pub fn apply(&self, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        conj_apply(self, x)
    }

    /// The conjugation `q*·s·conj(q)`, which certifies `q*·t·q` whenever
    /// `self` certifies `t`.
    pub fn transport(&self, q: &ComplexMatrix<T>) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.nrows(),
            });
        }
        let s = q.adjoint() * &self.s * linalg::conj(q);
        Ok(Self::from_exact(symmetrize(&s)))
    }

    /// The conjugation `diag(s₁, s₂)` on the direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_exact(linalg::direct_sum(&self.s, &other.s))
    }
}

/// `(s + sᵀ)/2`; removes rounding-level asymmetry from products that are
/// symmetric in exact arithmetic.
pub(crate) fn symmetrize<T: Real>(s: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    (s + s.transpose()) * Complex::new(lit::<T>(0.5), T::zero())
}

/// Checks that `s` is symmetric and unitary and wraps it as a conjugation.
pub fn validate_conjugation<T: Real>(s: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Conjugation<T>> {
    let n = require_square(&s)?;
    if !all_finite(&s) {
        return Err(Error::NonFinite);
    }
    let bound = tol.rel * lit::<T>(n.max(1) as f64) + tol.abs;
    let c = Conjugation::from_exact(s);
    if !(c.unitarity_residual <= bound) {
        return Err(Error::NotUnitary(to_f64(c.unitarity_residual)));
    }
    if !(c.symmetry_residual <= bound) {
        return Err(Error::NotInvolutive(to_f64(c.symmetry_residual)));
    }
    Ok(c)
}

/// Applies the conjugation: `x ↦ s·conj(x)`.
pub fn conj_apply<T: Real>(c: &Conjugation<T>, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
    if x.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: x.len(),
        });
    }
    Ok(&c.s * x.map(|z| z.conj()))
}

/// `‖t·s − s·tᵀ‖_F / max(1, ‖t‖_F)`; zero exactly when `t = C t* C`.
pub fn csym_residual<T: Real>(t: &ComplexMatrix<T>, c: &Conjugation<T>) -> Result<T> {
    let n = require_square(t)?;
    if n != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: n,
        });
    }
    let diff = t * &c.s - &c.s * t.transpose();
    Ok(frobenius(&diff) / frobenius(t).max(T::one()))
}

/// Named conjugations used throughout the builders.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalKind<T: Real> {
    /// `s = I`: entrywise complex conjugation.
    Entrywise,
    /// `s` = reversal permutation; the discrete form of `f(x) ↦ conj(f(1−x))`.
    Flip,
    /// `(f₁, f₂) ↦ (conj f₂, conj f₁)` on `C^m ⊕ C^m`, with the first `m`
    /// coordinates holding `f₁`.
    BlockSwap,
    /// `diag(s₁, s₂)`.
    DirectSum(Box<Conjugation<T>>, Box<Conjugation<T>>),
}

pub fn canonical_conjugation<T: Real>(kind: &CanonicalKind<T>, n: usize) -> Result<Conjugation<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    let one = Complex::new(T::one(), T::zero());
    let s = match kind {
        CanonicalKind::Entrywise => identity::<T>(n),
        CanonicalKind::Flip => DMatrix::from_fn(n, n, |i, j| {
            if i + j == n - 1 {
                one
            } else {
                Complex::new(T::zero(), T::zero())
            }
        }),
        CanonicalKind::BlockSwap => {
            if n % 2 != 0 {
                return Err(Error::InvalidDimension(format!(
                    "block swap needs an even dimension, got {n}"
                )));
            }
            let m = n / 2;
            DMatrix::from_fn(n, n, |i, j| {
                if i + m == j || j + m == i {
                    one
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
        }
        CanonicalKind::DirectSum(a, b) => {
            if a.dim() + b.dim() != n {
                return Err(Error::InvalidDimension(format!(
                    "direct sum has dimension {}, requested {n}",
                    a.dim() + b.dim()
                )));
            }
            return Ok(a.direct_sum(b));
        }
    };
    Ok(Conjugation::from_exact(s))
}
