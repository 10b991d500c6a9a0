//! Contractions with one-dimensional defect and codefect spaces.
//!
//! If `I − t*t = d·uu*` and `I − tt* = d·ww*` then `t·u = κ·w` with
//! `|κ|² = 1 − d`, and `t` agrees with a unitary on `u⊥`. We complete it by
//! `U = t + c·w u*` with `c = (1 − |κ|)·phase(κ)`, so that `U·u = phase(κ)·w`
//! (`phase(0) = 1`). Then `t = U + a·(U u)⊗u` with the real `a = |κ| − 1`.

use nalgebra::DVector;
use num_complex::Complex;

use super::normal_rank_one::rank_one_conjugation;
use super::pullback;
use crate::conjugation::csym_residual;
use crate::error::{Error, Result};
use crate::linalg::{identity, numerical_rank, require_square, schur, spectral_norm, svd};
use crate::scalar::{modulus, phase, to_f64, ComplexMatrix, ComplexVector, Cx, Real};
use crate::solver::{decide, SolveConfig};
use crate::tolerance::Tolerance;
use crate::verdict::Verdict;

pub const DEFECT_ONE: &str = "defect_one";

#[derive(Debug, Clone, PartialEq)]
pub struct DefectOne<T: Real> {
    pub u: ComplexMatrix<T>,
    pub a: Cx<T>,
    pub v: ComplexVector<T>,
    /// Unit vector spanning the range of `I − tt*`.
    pub w: ComplexVector<T>,
    pub kappa: Cx<T>,
    /// The constant in `U = t + c·w u*`.
    pub c: Cx<T>,
}

impl<T: Real> DefectOne<T> {
    /// `U + a·(U v)⊗v`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let uv = &self.u * &self.v;
        &self.u + uv * self.v.adjoint() * self.a
    }
}

/// Rank of a positive semidefinite defect operator and its top singular vector.
fn defect<T: Real>(d: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<(usize, ComplexVector<T>)> {
    let f = svd(d)?;
    let rank = numerical_rank(&f.sigma, tol.rank_threshold(T::one()))?;
    Ok((rank, f.u.column(0).into_owned()))
}

pub fn defect_one_decompose<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<DefectOne<T>> {
    let n = require_square(t)?;
    let norm = spectral_norm(t)?;
    if norm > T::one() + tol.rank_threshold(T::one()) {
        return Err(Error::NotContraction(to_f64(norm)));
    }
    let id = identity::<T>(n);
    let (r1, u) = defect(&(&id - t.adjoint() * t), tol)?;
    let (r2, w) = defect(&(&id - t * t.adjoint()), tol)?;
    if r1 != 1 || r2 != 1 {
        return Err(Error::DefectRankNotOne {
            defect: r1,
            codefect: r2,
        });
    }
    let kappa = (w.adjoint() * t * &u)[(0, 0)];
    let p = phase(kappa);
    let c = p * (T::one() - modulus(kappa));
    let unitary = t + &w * u.adjoint() * c;
    Ok(DefectOne {
        u: unitary,
        a: Complex::new(modulus(kappa) - T::one(), T::zero()),
        v: u,
        w,
        kappa,
        c,
    })
}

/// Certifies `t` through the eigenbasis of the unitary part: there
/// `t = Λ + a·(Λ v')⊗v'`, the normal rank-one form with `θ = λ`. When the
/// formula does not certify (repeated eigenvalues of `U`) the generic
/// decision pipeline takes over.
pub fn defect_one_certify<T: Real>(
    t: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
    cfg: &SolveConfig<T>,
) -> Result<Verdict<T>> {
    let parts = defect_one_decompose(t, tol)?;
    let (q, r) = schur(&parts.u)?;
    let theta: Vec<Cx<T>> = (0..r.nrows()).map(|i| phase(r[(i, i)])).collect();
    let v = q.adjoint() * &parts.v;
    let local = rank_one_conjugation(&theta, &DVector::from_iterator(v.len(), v.iter().map(|&x| {
        if modulus(x) <= tol.abs {
            Complex::new(T::zero(), T::zero())
        } else {
            x
        }
    })));
    let c = pullback(&q, &local);
    let residual = csym_residual(t, &c)?;
    if residual <= cfg.accept_tol {
        return Ok(Verdict::cso(DEFECT_ONE, c, residual));
    }
    decide(t, cfg)
}
