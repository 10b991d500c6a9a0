//! A partial isometry with equal kernel dimensions that is not complex
//! symmetric.
//!
//! `T = [[A, 0], [B, 0]]` on `C³ ⊕ Cⁿ` where the columns of `[A; B]` are
//! orthonormal. `A` has simple eigenvalues whose eigenvector Gram moduli
//! differ from those of `A*`, so `A` is not complex symmetric, and neither
//! is `T`, whose compression to the initial space is `A`.

use num_complex::Complex;

use crate::diagnostics::simple_eig_pairs_test;
use crate::error::{Error, Result};
use crate::linalg::zeros;
use crate::scalar::{lit, ComplexMatrix, Real};
use crate::solver::{decide_with, DecideOptions};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometryFixture<T: Real> {
    pub n: usize,
    pub t: ComplexMatrix<T>,
    pub a: ComplexMatrix<T>,
    pub b: ComplexMatrix<T>,
    /// `T*T`
    pub p: ComplexMatrix<T>,
}

pub fn partial_isometry_counterexample<T: Real>(n: usize) -> Result<PartialIsometryFixture<T>> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let r = |x: f64| Complex::new(lit::<T>(x), T::zero());
    let a = ComplexMatrix::from_row_slice(
        3,
        3,
        &[r(0.), r(0.5), r(0.), r(0.), r(0.), r(0.25), r(1.), r(0.), r(0.)],
    );
    let mut b = zeros::<T>(n, 3);
    b[(0, 1)] = Complex::new(lit::<T>(3.0).sqrt() / lit(2.0), T::zero());
    b[(1, 2)] = Complex::new(lit::<T>(15.0).sqrt() / lit(4.0), T::zero());
    let mut t = zeros::<T>(n + 3, n + 3);
    t.view_mut((0, 0), (3, 3)).copy_from(&a);
    t.view_mut((3, 0), (n, 3)).copy_from(&b);
    let p = t.adjoint() * &t;
    Ok(PartialIsometryFixture { n, t, a, b, p })
}

/// Runs the decision pipeline on `T`; if that is inconclusive, refutes the
/// compression `A` instead.
pub fn refute_counterexample<T: Real>(
    fixture: &PartialIsometryFixture<T>,
    opts: &DecideOptions<T>,
) -> Result<Verdict<T>> {
    let direct = decide_with(&fixture.t, opts)?.verdict;
    if direct.is_not_cso() {
        return Ok(direct);
    }
    simple_eig_pairs_test(&fixture.a, &opts.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{is_partial_isometry, kernel_dims, SIMPLE_EIG_PAIRS_TEST};
    use crate::linalg::{eigenvalues, frobenius, identity};
    fn cx(re: f64, im: f64) -> num_complex::Complex<f64> {
        num_complex::Complex::new(re, im)
    }
    use crate::tolerance::Tolerance;

    #[test]
    fn fixture_invariants() {
        for n in 2..6 {
            let f = partial_isometry_counterexample::<f64>(n).unwrap();
            let gram = f.a.adjoint() * &f.a + f.b.adjoint() * &f.b;
            assert!(frobenius(&(gram - identity::<f64>(3))) <= 1e-12);
            assert!(frobenius(&(&f.p * &f.p - &f.p)) <= 1e-12);
            assert!(is_partial_isometry(&f.t, &Tolerance::default()));
            assert_eq!(kernel_dims(&f.t, &Tolerance::default()).unwrap(), (n, n));
        }
        assert!(matches!(partial_isometry_counterexample::<f64>(1), Err(Error::InvalidN(1))));
    }

    #[test]
    fn compression_block_facts() {
        let f = partial_isometry_counterexample::<f64>(2).unwrap();
        let a_star_a = f.a.adjoint() * &f.a;
        for (i, d) in [1.0, 0.25, 1.0 / 16.0].iter().enumerate() {
            assert!((a_star_a[(i, i)] - cx(*d, 0.)).norm() < 1e-15);
        }
        // λ³ = 1/8, so the spectrum is ½ times the cube roots of unity.
        let ev = eigenvalues(&f.a).unwrap();
        let s = 3f64.sqrt() / 4.0;
        for y in [cx(0.5, 0.), cx(-0.25, s), cx(-0.25, -s)] {
            assert!(ev.iter().any(|x| (x - y).norm() < 1e-12), "{y} missing from {ev:?}");
        }
        let v1 = nalgebra::DVector::from_vec(vec![cx(1., 0.), cx(1., 0.), cx(2., 0.)]) / cx(6f64.sqrt(), 0.);
        assert!((&f.a * &v1 - &v1 * cx(0.5, 0.)).norm() < 1e-15);
    }

    #[test]
    fn counterexample_is_refuted() {
        for n in [2, 3, 5] {
            let f = partial_isometry_counterexample::<f64>(n).unwrap();
            let v = refute_counterexample(&f, &DecideOptions::default()).unwrap();
            assert!(v.is_not_cso(), "n = {n}: {v:?}");
        }
        let f = partial_isometry_counterexample::<f64>(2).unwrap();
        let v = simple_eig_pairs_test(&f.a, &Tolerance::default()).unwrap();
        assert_eq!(v.test, SIMPLE_EIG_PAIRS_TEST);
        let w = v.obstruction.unwrap();
        let mut pair = [w.left_value, w.right_value];
        pair.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((pair[0] - 1.0 / 3.0).abs() < 1e-12 && (pair[1] - 0.5).abs() < 1e-12, "{pair:?}");
    }
}
