//! Search over the unitary group for `q` with `q*·t·q` complex symmetric.
//!
//! If `M = q*·t·q` is symmetric then `s = q·qᵀ` is a conjugation for `t`,
//! since `t·s = q·M·qᵀ` and `s·tᵀ = q·Mᵀ·qᵀ`. The objective is the
//! antisymmetric part `A = M − Mᵀ`. Small problems use Levenberg–Marquardt
//! in skew-Hermitian coordinates, large ones Riemannian gradient descent;
//! both retract through the Cayley transform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Method, SolveConfig, SolveOutcome};
use crate::conjugation::{csym_residual, validate_conjugation};
use crate::error::Result;
use crate::linalg::{cayley, frobenius, identity, orthonormalize, random_unitary, require_square};
use crate::scalar::{lit, ComplexMatrix, Real};
use crate::tolerance::Tolerance;
use crate::verdict::{UnknownReason, Verdict};

pub const MANIFOLD_SEARCH: &str = "uecsm_search";

/// Above this dimension the normal equations get too expensive and the
/// search switches to first-order steps.
const LM_MAX_DIM: usize = 16;
const BATCH: usize = 8;
const REORTHO_EVERY: usize = 25;
const STALL_WINDOW: usize = 60;

struct RestartResult<T: Real> {
    residual: T,
    q: ComplexMatrix<T>,
    iterations: usize,
}

/// Multi-start search for a unitary `q` making `q*·t·q` symmetric.
///
/// Restart 0 starts from the identity; restart `r > 0` starts from a Haar
/// unitary drawn from stream `r` of a ChaCha8 generator seeded with
/// `cfg.seed`. Restarts run in parallel batches of fixed size, so the
/// outcome does not depend on the thread count.
pub fn uecsm_search<T: Real>(t: &ComplexMatrix<T>, cfg: &SolveConfig<T>) -> Result<SolveOutcome<T>> {
    cfg.validate()?;
    let n = require_square(t)?;
    let scale = frobenius(t).max(T::one());
    let th = t.map(|z| z / scale);
    let target = cfg.accept_tol * lit(1e-2);

    let mut best: Option<(usize, RestartResult<T>)> = None;
    let mut iterations_used = 0;
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + BATCH).min(cfg.restarts);
        let results: Vec<RestartResult<T>> = (start..end)
            .into_par_iter()
            .map(|r| {
                let q0 = initial_point::<T>(cfg.seed, r, n);
                run_restart(&th, q0, cfg.max_iters, target)
            })
            .collect();
        for (offset, res) in results.into_iter().enumerate() {
            iterations_used += res.iterations;
            let better = match &best {
                None => true,
                Some((_, b)) => res.residual < b.residual,
            };
            if better {
                best = Some((start + offset, res));
            }
        }
        if best.as_ref().is_some_and(|(_, b)| b.residual <= cfg.accept_tol) {
            break;
        }
        start = end;
    }

    let (_, best) = best.expect("at least one restart");
    if best.residual <= cfg.accept_tol {
        let s = &best.q * best.q.transpose();
        let accept = Tolerance::new(cfg.accept_tol.max(lit(1e-12)), T::zero())?;
        if let Ok(c) = validate_conjugation(s, &accept) {
            let residual = csym_residual(t, &c)?;
            if residual <= cfg.accept_tol {
                return Ok(SolveOutcome {
                    verdict: Verdict::cso(MANIFOLD_SEARCH, c, residual),
                    best_residual: residual,
                    iterations_used,
                    method: Method::ManifoldSearch,
                });
            }
        }
    }
    let reason = if best.residual > cfg.fail_tol {
        UnknownReason::SearchStalled
    } else {
        UnknownReason::Inconclusive
    };
    Ok(SolveOutcome {
        verdict: Verdict::unknown(MANIFOLD_SEARCH, best.residual, reason),
        best_residual: best.residual,
        iterations_used,
        method: Method::ManifoldSearch,
    })
}

fn initial_point<T: Real>(seed: u64, restart: usize, n: usize) -> ComplexMatrix<T> {
    if restart == 0 {
        return identity(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    random_unitary(&mut rng, n)
}

/// `A = M − Mᵀ` for `M = q*·t·q`.
fn antisym_part<T: Real>(t: &ComplexMatrix<T>, q: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let m = q.adjoint() * t * q;
    let a = &m - m.transpose();
    (m, a)
}

fn run_restart<T: Real>(t: &ComplexMatrix<T>, q0: ComplexMatrix<T>, max_iters: usize, target: T) -> RestartResult<T> {
    if t.nrows() > LM_MAX_DIM {
        gradient_descent(t, q0, max_iters, target)
    } else {
        levenberg_marquardt(t, q0, max_iters, target)
    }
}

/// Skew-Hermitian basis element `k` as a list of `(row, col, value)`.
fn basis_entries<T: Real>(n: usize, k: usize) -> Vec<(usize, usize, Complex<T>)> {
    let one = T::one();
    let zero = T::zero();
    if k < n {
        return vec![(k, k, Complex::new(zero, one))];
    }
    let mut idx = k - n;
    let pair = idx / 2;
    let imag = idx % 2 == 1;
    // decode the `pair`-th strictly upper position in row-major order
    let mut i = 0;
    idx = pair;
    while idx >= n - 1 - i {
        idx -= n - 1 - i;
        i += 1;
    }
    let j = i + 1 + idx;
    if imag {
        vec![(i, j, Complex::new(zero, one)), (j, i, Complex::new(zero, one))]
    } else {
        vec![(i, j, Complex::new(one, zero)), (j, i, Complex::new(-one, zero))]
    }
}

fn skew_from_params<T: Real>(n: usize, delta: &DVector<T>) -> ComplexMatrix<T> {
    let mut omega = ComplexMatrix::<T>::zeros(n, n);
    for (k, &d) in delta.iter().enumerate() {
        for (i, j, v) in basis_entries::<T>(n, k) {
            omega[(i, j)] += v * d;
        }
    }
    omega
}

fn residual_vector<T: Real>(a: &ComplexMatrix<T>) -> DVector<T> {
    let n = a.nrows();
    let mut r = DVector::zeros(n * (n - 1));
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            r[k] = a[(i, j)].re;
            r[k + 1] = a[(i, j)].im;
            k += 2;
        }
    }
    r
}

fn jacobian<T: Real>(m: &ComplexMatrix<T>) -> DMatrix<T> {
    let n = m.nrows();
    let rows = n * (n - 1);
    let cols = n * n;
    let mut jac = DMatrix::zeros(rows, cols);
    let mut x = ComplexMatrix::<T>::zeros(n, n);
    for k in 0..cols {
        x.fill(Complex::new(T::zero(), T::zero()));
        for (a, b, w) in basis_entries::<T>(n, k) {
            // M·Ω contributes M[:, a]·w to column b; Ω·M contributes w·M[b, :] to row a
            for r in 0..n {
                x[(r, b)] += m[(r, a)] * w;
                x[(a, r)] -= w * m[(b, r)];
            }
        }
        let mut row = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = x[(i, j)] - x[(j, i)];
                jac[(row, k)] = d.re;
                jac[(row + 1, k)] = d.im;
                row += 2;
            }
        }
    }
    jac
}

fn levenberg_marquardt<T: Real>(
    t: &ComplexMatrix<T>,
    mut q: ComplexMatrix<T>,
    max_iters: usize,
    target: T,
) -> RestartResult<T> {
    let n = t.nrows();
    let (mut m, a) = antisym_part(t, &q);
    let mut res = frobenius(&a);
    if n < 2 || res <= target {
        return RestartResult { residual: res, q, iterations: 0 };
    }
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let mut r = residual_vector(&a);
    let mut jac = jacobian(&m);
    let mut grad = jac.tr_mul(&r);
    let mut hess = jac.tr_mul(&jac);
    let mut mu = lit::<T>(1e-3) * hess.diagonal().max().max(lit(1e-12));
    let mut nu = two;
    let mut window_best = res;
    let mut window_start = 0;
    let mut accepted = 0;

    for iter in 1..=max_iters {
        let mut sys = hess.clone();
        for d in 0..sys.nrows() {
            sys[(d, d)] += mu;
        }
        let Some(chol) = sys.cholesky() else {
            mu *= nu;
            nu *= two;
            continue;
        };
        let delta = -chol.solve(&grad);
        let omega = skew_from_params(n, &delta);
        let Ok(step) = cayley(&omega) else {
            mu *= nu;
            nu *= two;
            continue;
        };
        let q_new = &q * step;
        let (m_new, a_new) = antisym_part(t, &q_new);
        let r_new = residual_vector(&a_new);
        let f = half * r.norm_squared();
        let f_new = half * r_new.norm_squared();
        let pred = half * delta.dot(&(&delta * mu - &grad));
        let rho = if pred > T::zero() { (f - f_new) / pred } else { -T::one() };
        if rho > T::zero() {
            accepted += 1;
            q = if accepted % REORTHO_EVERY == 0 { orthonormalize(&q_new) } else { q_new };
            if accepted % REORTHO_EVERY == 0 {
                let (mm, aa) = antisym_part(t, &q);
                m = mm;
                r = residual_vector(&aa);
                res = frobenius(&aa);
            } else {
                m = m_new;
                r = r_new;
                res = frobenius(&a_new);
            }
            if res <= target {
                return RestartResult { residual: res, q, iterations: iter };
            }
            jac = jacobian(&m);
            grad = jac.tr_mul(&r);
            hess = jac.tr_mul(&jac);
            let c = two * rho - T::one();
            mu *= (T::one() - c * c * c).max(lit(1.0 / 3.0));
            nu = two;
        } else {
            mu *= nu;
            nu *= two;
        }
        if !(nu < lit(1e15)) || !mu.is_finite() {
            return RestartResult { residual: res, q, iterations: iter };
        }
        if iter - window_start >= STALL_WINDOW {
            if res > window_best * lit(0.99) {
                return RestartResult { residual: res, q, iterations: iter };
            }
            window_best = res;
            window_start = iter;
        }
    }
    RestartResult { residual: res, q, iterations: max_iters }
}

/// Riemannian gradient of `‖A‖²_F` in the skew-Hermitian tangent
/// coordinates `q ↦ q·(I + Ω)`.
fn riemannian_gradient<T: Real>(m: &ComplexMatrix<T>, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let a_star = a.adjoint();
    let z = &a_star * m - m * &a_star;
    (z.adjoint() - z) * Complex::new(lit::<T>(2.0), T::zero())
}

fn gradient_descent<T: Real>(
    t: &ComplexMatrix<T>,
    mut q: ComplexMatrix<T>,
    max_iters: usize,
    target: T,
) -> RestartResult<T> {
    let (mut m, mut a) = antisym_part(t, &q);
    let mut f = frobenius(&a).powi(2);
    let mut eta: T = lit(0.1);
    let mut window_best = f;
    let mut window_start = 0;
    for iter in 1..=max_iters {
        let res = f.sqrt();
        if res <= target {
            return RestartResult { residual: res, q, iterations: iter - 1 };
        }
        let g = riemannian_gradient(&m, &a);
        let gnorm2 = frobenius(&g).powi(2);
        if gnorm2 == T::zero() {
            return RestartResult { residual: res, q, iterations: iter };
        }
        let mut accepted = false;
        for _ in 0..40 {
            let omega = &g * Complex::new(-eta, T::zero());
            let Ok(step) = cayley(&omega) else {
                eta *= lit(0.5);
                continue;
            };
            let q_new = &q * step;
            let (m_new, a_new) = antisym_part(t, &q_new);
            let f_new = frobenius(&a_new).powi(2);
            if f_new <= f - lit::<T>(1e-4) * eta * gnorm2 {
                q = if iter % REORTHO_EVERY == 0 { orthonormalize(&q_new) } else { q_new };
                let (mm, aa) = antisym_part(t, &q);
                m = mm;
                a = aa;
                f = frobenius(&a).powi(2);
                let _ = (m_new, a_new);
                eta *= lit(2.0);
                accepted = true;
                break;
            }
            eta *= lit(0.5);
        }
        if !accepted {
            return RestartResult { residual: f.sqrt(), q, iterations: iter };
        }
        if iter - window_start >= STALL_WINDOW * 4 {
            if f > window_best * lit(0.98) {
                return RestartResult { residual: f.sqrt(), q, iterations: iter };
            }
            window_best = f;
            window_start = iter;
        }
    }
    RestartResult { residual: f.sqrt(), q, iterations: max_iters }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::scalar::cx;
    use crate::verdict::Status;

    type M = ComplexMatrix<f64>;

    fn jordan(n: usize) -> M {
        M::from_fn(n, n, |i, j| if j == i + 1 { cx(1.0, 0.0) } else { cx(0.0, 0.0) })
    }

    #[test]
    fn basis_covers_skew_hermitian_space() {
        let n = 4;
        let mut seen = vec![vec![0; n]; n];
        for k in 0..n * n {
            let e = basis_entries::<f64>(n, k);
            for &(i, j, v) in &e {
                seen[i][j] += 1;
                let partner = e.iter().find(|&&(a, b, _)| a == j && b == i).unwrap().2;
                assert_eq!(v, -partner.conj());
            }
        }
        assert!(seen.iter().enumerate().all(|(i, row)| row
            .iter()
            .enumerate()
            .all(|(j, &c)| c == if i == j { 1 } else { 2 })));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4;
        let t: M = gaussian_matrix(&mut rng, n, n);
        let q: M = random_unitary(&mut rng, n);
        let (m, a) = antisym_part(&t, &q);
        let jac = jacobian(&m);
        let r0 = residual_vector(&a);
        let h = 1e-7;
        for k in 0..n * n {
            let mut d = DVector::zeros(n * n);
            d[k] = h;
            let q1 = &q * cayley(&skew_from_params(n, &d)).unwrap();
            let (_, a1) = antisym_part(&t, &q1);
            let fd = (residual_vector(&a1) - &r0) / h;
            let err = (fd - jac.column(k)).norm();
            assert!(err < 1e-5, "column {k}: {err}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        let t: M = gaussian_matrix(&mut rng, n, n);
        let q: M = random_unitary(&mut rng, n);
        let (m, a) = antisym_part(&t, &q);
        let g = riemannian_gradient(&m, &a);
        let f = |q: &M| frobenius(&antisym_part(&t, q).1).powi(2);
        for trial in 0..5 {
            let x: M = gaussian_matrix(&mut rng, n, n);
            let omega = (&x - x.adjoint()) * cx(0.5, 0.0);
            let h = 1e-6;
            let plus = &q * cayley(&(&omega * cx(h, 0.0))).unwrap();
            let minus = &q * cayley(&(&omega * cx(-h, 0.0))).unwrap();
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            let analytic = (g.adjoint() * &omega).trace().re;
            assert!((fd - analytic).abs() < 1e-6 * (1.0 + fd.abs()), "trial {trial}: {fd} vs {analytic}");
        }
    }

    #[test]
    fn symmetric_input_certified_by_identity_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g: M = gaussian_matrix(&mut rng, 5, 5);
        let t = &g + g.transpose();
        let out = uecsm_search(&t, &SolveConfig::default()).unwrap();
        assert_eq!(out.verdict.status, Status::Cso);
        let s = out.verdict.certificate.unwrap().into_matrix();
        assert!((s - M::identity(5, 5)).norm() < 1e-15);
    }

    #[test]
    fn jordan_blocks_are_certified() {
        for n in [2, 3, 5, 8] {
            let out = uecsm_search(&jordan(n), &SolveConfig::default()).unwrap();
            assert_eq!(out.verdict.status, Status::Cso, "n = {n}");
            assert!(out.best_residual <= 1e-8);
        }
    }

    #[test]
    fn large_dimension_uses_first_order_steps() {
        let out = uecsm_search(&jordan(20), &SolveConfig::default()).unwrap();
        assert_eq!(out.verdict.status, Status::Cso);
    }

    #[test]
    fn non_cso_input_stalls() {
        let t = M::from_row_iterator(
            3,
            3,
            [0., 0.5, 0., 0., 0., 0.25, 1., 0., 0.].iter().map(|&x| cx(x, 0.0)),
        );
        let cfg = SolveConfig { restarts: 4, max_iters: 300, ..SolveConfig::default() };
        let out = uecsm_search(&t, &cfg).unwrap();
        assert_eq!(out.verdict.status, Status::Unknown);
        assert_eq!(out.verdict.reason, Some(UnknownReason::SearchStalled));
        assert!(out.best_residual > 1e-3);
    }

    #[test]
    fn search_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t: M = gaussian_matrix(&mut rng, 4, 4);
        let cfg = SolveConfig { seed: 42, ..SolveConfig::default() };
        let a = uecsm_search(&t, &cfg).unwrap();
        let b = uecsm_search(&t, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
