//! Direct construction of the conjugation for matrices with simple spectrum.
//!
//! With unit eigenvectors `v_i` of `t` and `w_i` of `t*` (for `conj λ_i`),
//! any conjugation with `t = C t* C` has `C v_i = α_i w_i` for unimodular
//! `α_i`. Preservation of inner products, `⟨C x, C y⟩ = ⟨y, x⟩`, then forces
//!
//! ```text
//! α_i · conj(α_j) · ⟨w_i, w_j⟩ = ⟨v_j, v_i⟩        for all i, j.
//! ```
//!
//! The moduli of both sides must agree; the phases fix `α` along every edge
//! with `⟨w_i, w_j⟩ ≠ 0`. Once the phases are chosen the map is determined:
//! `s = W · diag(α) · conj(V⁻¹)`.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::{Method, SolveOutcome};
use crate::conjugation::{csym_residual, validate_conjugation};
use crate::diagnostics::spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, require_square};
use crate::scalar::{lit, modulus, phase, ComplexMatrix, Cx, Real};
use crate::tolerance::Tolerance;
use crate::verdict::{ObstructionWitness, UnknownReason, Verdict, WitnessLocation};

pub const EIGENPHASE: &str = "eigenphase_construct";

/// Builds a certificate from eigenvector phases when `t` has `n` distinct,
/// well-conditioned eigenvalues. Acceptance threshold is `tol.rel`.
pub fn eigenphase_construct<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<SolveOutcome<T>> {
    eigenphase_with_accept(t, tol, tol.rel)
}

pub(crate) fn eigenphase_with_accept<T: Real>(
    t: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
    accept_tol: T,
) -> Result<SolveOutcome<T>> {
    let n = require_square(t)?;
    let not_applicable = |residual: T| SolveOutcome {
        verdict: Verdict::unknown(EIGENPHASE, residual, UnknownReason::NotApplicable),
        best_residual: residual,
        iterations_used: 0,
        method: Method::Eigenphase,
    };
    let spec = spectrum(t, tol)?;
    if n == 0 || !spec.all_simple || spec.clusters != n || spec.pairs.len() != n {
        return Ok(not_applicable(<T as Real>::infinity()));
    }
    let v = DMatrix::from_columns(&spec.pairs.iter().map(|p| p.right_unit_vector.clone()).collect::<Vec<_>>());
    let w = DMatrix::from_columns(&spec.pairs.iter().map(|p| p.adjoint_unit_vector.clone()).collect::<Vec<_>>());
    let sep = tol.separation(T::one());
    let refute = |left: T, right: T, i: usize, j: usize| {
        let outcome = Verdict::not_cso(ObstructionWitness {
            test_name: EIGENPHASE,
            left_value: left,
            right_value: right,
            location: WitnessLocation::Pair(i, j),
            values: vec![spec.pairs[i].eigenvalue, spec.pairs[j].eigenvalue],
        });
        SolveOutcome {
            best_residual: (left - right).abs(),
            verdict: outcome,
            iterations_used: 0,
            method: Method::Eigenphase,
        }
    };

    // gram_v[(j, i)] = ⟨v_j, v_i⟩, gram_w[(i, j)] = ⟨w_i, w_j⟩
    let gram_v = v.adjoint() * &v;
    let gram_w = w.adjoint() * &w;
    let gv = |j: usize, i: usize| gram_v[(i, j)];
    let gw = |i: usize, j: usize| gram_w[(j, i)];

    for i in 0..n {
        for j in (i + 1)..n {
            let left = modulus(gv(j, i));
            let right = modulus(gw(i, j));
            if (left - right).abs() > sep {
                return Ok(refute(left, right, i, j));
            }
        }
    }

    // Maximum spanning forest over edges with a usable phase.
    let mut alpha: Vec<Option<Cx<T>>> = vec![None; n];
    let mut tree_edge = vec![vec![false; n]; n];
    let mut components = 0;
    for root in 0..n {
        if alpha[root].is_some() {
            continue;
        }
        components += 1;
        alpha[root] = Some(Complex::new(T::one(), T::zero()));
        loop {
            let mut best: Option<(T, usize, usize)> = None;
            for i in (0..n).filter(|&i| alpha[i].is_some()) {
                for j in (0..n).filter(|&j| alpha[j].is_none()) {
                    let weight = modulus(gw(i, j));
                    if weight > sep && best.is_none_or(|(b, _, _)| weight > b) {
                        best = Some((weight, i, j));
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            // α_i conj(α_j) = ρ  ⇒  α_j = conj(ρ) α_i
            let rho = phase(gv(j, i) / gw(i, j));
            alpha[j] = Some(rho.conj() * alpha[i].unwrap());
            tree_edge[i][j] = true;
            tree_edge[j][i] = true;
        }
    }
    let alpha: Vec<Cx<T>> = alpha.into_iter().map(|a| a.unwrap()).collect();

    for i in 0..n {
        for j in (i + 1)..n {
            if tree_edge[i][j] || modulus(gw(i, j)) <= sep {
                continue;
            }
            let lhs = alpha[i] * alpha[j].conj() * gw(i, j);
            let mismatch = modulus(lhs - gv(j, i));
            if mismatch > sep {
                return Ok(refute(mismatch, T::zero(), i, j));
            }
        }
    }

    let v_inv = match v.clone().try_inverse() {
        Some(m) => m,
        None => return Ok(not_applicable(<T as Real>::infinity())),
    };
    let d = ComplexMatrix::<T>::from_diagonal(&nalgebra::DVector::from_vec(alpha));
    let s = &w * d * linalg::conj(&v_inv);

    let accept = Tolerance::new(accept_tol, tol.abs)?;
    match validate_conjugation(s.clone(), &accept) {
        Ok(c) => {
            let residual = csym_residual(t, &c)?;
            if residual <= accept_tol {
                return Ok(SolveOutcome {
                    verdict: Verdict::cso(EIGENPHASE, c, residual),
                    best_residual: residual,
                    iterations_used: 0,
                    method: Method::Eigenphase,
                });
            }
            Ok(not_applicable(residual))
        }
        Err(Error::NotInvolutive(sym)) => {
            let sym: T = lit(sym);
            // With a connected phase graph the candidate is unique up to a
            // global phase, which does not affect symmetry.
            let bound = tol.separation(lit(n as f64));
            if components == 1 && sym > bound {
                return Ok(SolveOutcome {
                    best_residual: sym,
                    verdict: Verdict::not_cso(ObstructionWitness {
                        test_name: EIGENPHASE,
                        left_value: sym,
                        right_value: T::zero(),
                        location: WitnessLocation::None,
                        values: Vec::new(),
                    }),
                    iterations_used: 0,
                    method: Method::Eigenphase,
                });
            }
            Ok(SolveOutcome {
                verdict: Verdict::unknown(EIGENPHASE, sym, UnknownReason::Inconclusive),
                best_residual: sym,
                iterations_used: 0,
                method: Method::Eigenphase,
            })
        }
        Err(Error::NotUnitary(r)) => Ok(not_applicable(lit(r))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, random_unitary};
    use crate::scalar::cx;
    use crate::verdict::Status;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    #[test]
    fn real_diagonal_gets_identity_certificate() {
        let t = M::from_diagonal(&nalgebra::DVector::from_vec(vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)]));
        let out = eigenphase_construct(&t, &Tolerance::default()).unwrap();
        assert_eq!(out.verdict.status, Status::Cso);
        let s = out.verdict.certificate.unwrap().into_matrix();
        // Eigenvectors are standard basis vectors up to phase; s is diagonal unimodular.
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(s[(i, j)].norm() < 1e-14);
                }
            }
        }
        assert_eq!(out.method, Method::Eigenphase);
    }

    #[test]
    fn a_matrix_is_refuted_by_modulus_constraint() {
        let t = M::from_row_iterator(
            3,
            3,
            [0., 0.5, 0., 0., 0., 0.25, 1., 0., 0.].iter().map(|&x| cx(x, 0.0)),
        );
        let out = eigenphase_construct(&t, &Tolerance::default()).unwrap();
        assert_eq!(out.verdict.status, Status::NotCso);
        let w = out.verdict.obstruction.unwrap();
        assert!((w.left_value - 0.5).abs() < 1e-12);
        assert!((w.right_value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_normals_and_symmetrics_certify() {
        let tol = Tolerance::default();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q: M = random_unitary(&mut rng, 6);
            let d: M = gaussian_matrix(&mut rng, 6, 1);
            let t = &q * M::from_diagonal(&d.column(0).into_owned()) * q.adjoint();
            let out = eigenphase_construct(&t, &tol).unwrap();
            assert_eq!(out.verdict.status, Status::Cso, "seed {seed}");
            assert!(out.best_residual <= 1e-8);

            let g: M = gaussian_matrix(&mut rng, 5, 5);
            let sym = &g + g.transpose();
            let out = eigenphase_construct(&sym, &tol).unwrap();
            assert_eq!(out.verdict.status, Status::Cso, "seed {seed}");
        }
    }

    #[test]
    fn repeated_eigenvalues_are_not_applicable() {
        let t = M::identity(3, 3);
        let out = eigenphase_construct(&t, &Tolerance::default()).unwrap();
        assert_eq!(out.verdict.status, Status::Unknown);
        assert_eq!(out.verdict.reason, Some(UnknownReason::NotApplicable));
    }
}
