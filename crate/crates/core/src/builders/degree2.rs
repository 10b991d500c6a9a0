//! Operators satisfying `t² = α·t + β·I`.
//!
//! Each is unitarily equivalent to a direct sum of 1×1 and upper-triangular
//! 2×2 blocks. Nilpotent parts pair right singular vectors with left ones;
//! idempotent parts come from the singular value decomposition of the
//! off-diagonal corner `X` in `e = [[I, X], [0, 0]]`.

use num_complex::Complex;

use super::binormal::{atom_block, Atom};
use super::pullback;
use crate::conjugation::{csym_residual, Conjugation};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, identity, numerical_rank, spectral_norm, svd};
use crate::scalar::{csqrt, lit, modulus, to_f64, ComplexMatrix, Cx, Real};
use crate::tolerance::Tolerance;

/// A block of the canonical form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block<T: Real> {
    Scalar(Cx<T>),
    /// `[[u1, v], [0, u2]]`
    Upper { u1: Cx<T>, v: Cx<T>, u2: Cx<T> },
}

/// `t = q·d·q*` with `d` the direct sum of `blocks` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Degree2Canonical<T: Real> {
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
    pub q: ComplexMatrix<T>,
    pub blocks: Vec<Block<T>>,
}

impl<T: Real> Degree2Canonical<T> {
    pub fn block_matrix(&self) -> ComplexMatrix<T> {
        let n = self.q.nrows();
        let mut d = ComplexMatrix::zeros(n, n);
        let mut k = 0;
        for b in &self.blocks {
            match *b {
                Block::Scalar(z) => {
                    d[(k, k)] = z;
                    k += 1;
                }
                Block::Upper { u1, v, u2 } => {
                    d[(k, k)] = u1;
                    d[(k, k + 1)] = v;
                    d[(k + 1, k + 1)] = u2;
                    k += 2;
                }
            }
        }
        d
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        &self.q * self.block_matrix() * self.q.adjoint()
    }

    fn block_conjugation(&self, tol: &Tolerance<T>) -> ComplexMatrix<T> {
        let n = self.q.nrows();
        let one = Complex::new(T::one(), T::zero());
        let mut s = ComplexMatrix::zeros(n, n);
        let mut k = 0;
        for b in &self.blocks {
            match *b {
                Block::Scalar(_) => {
                    s[(k, k)] = one;
                    k += 1;
                }
                Block::Upper { u1, v, u2 } => {
                    let atom = Atom { u1, v, u2, weight: T::one() };
                    let blk = atom_block(&atom, tol);
                    for i in 0..2 {
                        for j in 0..2 {
                            s[(k + i, k + j)] = blk[i][j];
                        }
                    }
                    k += 2;
                }
            }
        }
        s
    }
}

/// Least-squares `(α, β)` for `t² ≈ α·t + β·I`, with the relative fit
/// residual `‖t² − α·t − β·I‖_F / max(1, ‖t‖²_F)`. Scalar multiples of the
/// identity fit with `α = 0`.
pub fn degree2_fit<T: Real>(t: &ComplexMatrix<T>) -> (Cx<T>, Cx<T>, T) {
    let n = t.nrows();
    let zero = Complex::new(T::zero(), T::zero());
    if n == 0 {
        return (zero, zero, T::zero());
    }
    let t2 = t * t;
    let id = identity::<T>(n);
    let nf: T = lit(n as f64);
    let tr = t.trace();
    // Normal equations in the basis (t, I), using the trace inner product.
    let g11 = Complex::new(frobenius(t).powi(2), T::zero());
    let g12 = tr.conj();
    let g22 = Complex::new(nf, T::zero());
    let r1 = t.zip_fold(&t2, zero, |acc, a, b| acc + a.conj() * b);
    let r2 = t2.trace();
    let det = g11 * g22 - g12 * g12.conj();
    let scale = frobenius(t).powi(2).max(T::one());
    let (alpha, beta) = if modulus(det) <= <T as Real>::epsilon() * lit(16.0) * modulus(g11 * g22) || modulus(det) == T::zero() {
        (zero, tr * tr / (nf * nf))
    } else {
        // [g11 g12; conj(g12) g22] [α; β] = [r1; r2]
        let a = (r1 * g22 - g12 * r2) / det;
        let b = (g11 * r2 - g12.conj() * r1) / det;
        (a, b)
    };
    let resid = frobenius(&(t2 - t * alpha - id * beta)) / scale;
    (alpha, beta, resid)
}

/// Certifies an operator of degree at most two.
pub fn degree2_conjugation<T: Real>(
    t: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(Conjugation<T>, Degree2Canonical<T>)> {
    let n = crate::linalg::require_square(t)?;
    let (alpha, beta, fit) = degree2_fit(t);
    if !(fit <= tol.rel) {
        return Err(Error::NotDegreeTwo(to_f64(fit)));
    }
    let canonical = if n == 0 {
        Degree2Canonical { alpha, beta, q: identity(0), blocks: Vec::new() }
    } else {
        let norm = spectral_norm(t)?.max(T::one());
        let half: T = lit(0.5);
        let disc = csqrt(alpha * alpha + beta * lit::<T>(4.0));
        let l1 = (alpha + disc) * half;
        let l2 = (alpha - disc) * half;
        let mean = t.trace() / lit::<T>(n as f64);
        let centered = frobenius(&(t - identity::<T>(n) * mean));
        if centered <= tol.rel * norm {
            Degree2Canonical { alpha, beta, q: identity(n), blocks: vec![Block::Scalar(mean); n] }
        } else if modulus(l1 - l2) <= tol.separation(norm) {
            let lambda = alpha * half;
            let (q, blocks) = nilpotent_form(&(t - identity::<T>(n) * lambda), lambda, tol)?;
            Degree2Canonical { alpha, beta, q, blocks }
        } else {
            let (q, blocks) = idempotent_form(t, l1, l2, tol)?;
            Degree2Canonical { alpha, beta, q, blocks }
        }
    };
    let s_blocks = Conjugation::from_exact(canonical.block_conjugation(tol));
    let c = pullback(&canonical.q, &s_blocks);
    csym_residual(t, &c)?;
    Ok((c, canonical))
}

/// For `m = Σ σᵢ uᵢ vᵢ*` with `m² = 0` the vectors `u₁, v₁, u₂, v₂, …` are
/// orthonormal, and completing them to a basis gives
/// `q*·m·q = ⊕ [[0, σᵢ], [0, 0]] ⊕ 0`.
fn nilpotent_form<T: Real>(
    m: &ComplexMatrix<T>,
    shift: Cx<T>,
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, Vec<Block<T>>)> {
    let n = m.nrows();
    let dec = svd(m)?;
    let scale = dec.sigma.first().copied().unwrap_or_else(T::zero);
    let rank = numerical_rank(&dec.sigma, tol.rank_threshold(scale.max(T::one())))?;
    if 2 * rank > n {
        return Err(Error::NotDegreeTwo(to_f64(frobenius(&(m * m)))));
    }
    let mut cols = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(n - rank);
    for i in 0..rank {
        cols.push(dec.u.column(i).into_owned());
        cols.push(dec.v.column(i).into_owned());
        blocks.push(Block::Upper { u1: shift, v: Complex::new(dec.sigma[i], T::zero()), u2: shift });
    }
    let q = if cols.is_empty() {
        identity(n)
    } else {
        crate::linalg::complete_basis(&orthonormal_or_err(ComplexMatrix::from_columns(&cols))?)
    };
    for _ in 2 * rank..n {
        blocks.push(Block::Scalar(shift));
    }
    Ok((q, blocks))
}

/// Checks the pairing basis is orthonormal (it is when `m² = 0`).
fn orthonormal_or_err<T: Real>(b: ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let k = b.ncols();
    let gram = b.adjoint() * &b;
    let err = frobenius(&(gram - identity::<T>(k)));
    if err > lit(1e-6) {
        return Err(Error::NotDegreeTwo(to_f64(err)));
    }
    Ok(b)
}

fn idempotent_form<T: Real>(
    t: &ComplexMatrix<T>,
    l1: Cx<T>,
    l2: Cx<T>,
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, Vec<Block<T>>)> {
    let n = t.nrows();
    let e = (t - identity::<T>(n) * l2) / (l1 - l2);
    let dec = svd(&e)?;
    let scale = dec.sigma.first().copied().unwrap_or_else(T::zero).max(T::one());
    let k = numerical_rank(&dec.sigma, tol.rank_threshold(scale))?;
    let p1 = dec.u.columns(0, k).into_owned();
    let p2 = dec.u.columns(k, n - k).into_owned();
    let x = p1.adjoint() * &e * &p2;
    let xs = svd(&x)?;
    let pairs = k.min(n - k);
    let mut cols = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(n);
    for i in 0..pairs {
        let tau = xs.sigma.get(i).copied().unwrap_or_else(T::zero);
        cols.push(&p1 * xs.u.column(i));
        cols.push(&p2 * xs.v.column(i));
        blocks.push(Block::Upper { u1: l1, v: (l1 - l2) * tau, u2: l2 });
    }
    for i in pairs..k {
        cols.push(&p1 * xs.u.column(i));
        blocks.push(Block::Scalar(l1));
    }
    for i in pairs..(n - k) {
        cols.push(&p2 * xs.v.column(i));
        blocks.push(Block::Scalar(l2));
    }
    Ok((ComplexMatrix::from_columns(&cols), blocks))
}
