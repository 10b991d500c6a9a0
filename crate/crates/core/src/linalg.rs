//! Dense linear-algebra helpers on top of nalgebra's complex decompositions.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, lit, modulus, phase, ComplexMatrix, ComplexVector, Cx, Real};

const MAX_SWEEPS: usize = 20_000;
const JACOBI_SWEEPS: usize = 100;

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn zeros<T: Real>(rows: usize, cols: usize) -> ComplexMatrix<T> {
    DMatrix::zeros(rows, cols)
}

/// Frobenius norm.
pub fn frobenius<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.norm()
}

/// Entrywise conjugate.
pub fn conj<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.map(|z| z.conj())
}

/// `⟨x, y⟩ = y* x`, linear in the first argument.
pub fn inner<T: Real>(x: &ComplexVector<T>, y: &ComplexVector<T>) -> Cx<T> {
    y.dotc(x)
}

pub(crate) fn require_square<T: Real>(m: &ComplexMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Singular value decomposition with singular values in descending order.
///
/// `v` holds right singular vectors as columns, so `m = u · diag(sigma) · v*`.
#[derive(Debug, Clone)]
pub struct SortedSvd<T: Real> {
    pub u: ComplexMatrix<T>,
    pub sigma: Vec<T>,
    pub v: ComplexMatrix<T>,
}

pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<SortedSvd<T>> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(SortedSvd {
            u: identity(r),
            sigma: Vec::new(),
            v: identity(c),
        });
    }
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    if r < c {
        let d = svd(&m.adjoint())?;
        return Ok(SortedSvd {
            u: d.v,
            sigma: d.sigma,
            v: d.u,
        });
    }
    let (a, v) = one_sided_jacobi(m)?;
    let norms: Vec<T> = a.column_iter().map(|col| col.norm()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let v = DMatrix::from_fn(c, c, |i, k| v[(i, order[k])]);
    let nonzero = sigma.iter().take_while(|&&s| s > T::zero()).count();
    let leading = DMatrix::from_fn(r, nonzero, |i, k| {
        let j = order[k];
        a[(i, j)] / norms[j]
    });
    Ok(SortedSvd {
        u: complete_basis(&leading),
        sigma,
        v,
    })
}

/// Hestenes one-sided Jacobi: rotates column pairs of `m` (with `m` at least
/// as tall as wide) until all columns are mutually orthogonal. Returns the
/// rotated matrix `m·v` and the accumulated unitary `v`.
fn one_sided_jacobi<T: Real>(m: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = identity::<T>(n);
    let eps = <T as Real>::epsilon();
    let two: T = lit(2.0);
    // Columns below rounding level of the whole matrix are left alone; their
    // mutual rotations would only shuffle noise and can cycle forever.
    let floor = (eps * frobenius(m)).powi(2);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = modulus(gamma);
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                // Scaling column q by conj(e) makes the pair's inner product real.
                let e = (gamma / g).conj();
                let zeta = (beta - alpha) / (two * g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let rotate = |mat: &mut ComplexMatrix<T>, len: usize| {
                    for i in 0..len {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * e;
                        mat[(i, p)] = xp * c - xq * s;
                        mat[(i, q)] = xp * s + xq * c;
                    }
                };
                rotate(&mut a, rows);
                rotate(&mut v, n);
            }
        }
        if !rotated {
            return Ok((a, v));
        }
    }
    Err(Error::EigensolverFailure)
}

pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(svd(m)?.sigma)
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(singular_values(m)?.first().copied().unwrap_or_else(T::zero))
}

/// Ratio by which a singular value must clear the rank threshold to be
/// counted with confidence. Values in `(threshold, RANK_BAND·threshold]`
/// make the rank ambiguous.
pub const RANK_BAND: f64 = 100.0;

/// Number of singular values above `threshold`.
///
/// Fails with `RankDeterminationUnstable` when a singular value sits in the
/// ambiguous band just above the threshold.
pub fn numerical_rank<T: Real>(sigma: &[T], threshold: T) -> Result<usize> {
    let band = threshold * lit::<T>(RANK_BAND);
    if let Some(&s) = sigma.iter().find(|&&s| s > threshold && s <= band) {
        return Err(Error::RankDeterminationUnstable {
            sigma: crate::scalar::to_f64(s),
            threshold: crate::scalar::to_f64(threshold),
        });
    }
    Ok(sigma.iter().filter(|&&s| s > threshold).count())
}

/// Orthonormal basis (as columns) of the numerical kernel of a square matrix.
pub fn null_space<T: Real>(m: &ComplexMatrix<T>, threshold: T) -> Result<ComplexMatrix<T>> {
    let n = require_square(m)?;
    let dec = svd(m)?;
    let rank = numerical_rank(&dec.sigma, threshold)?;
    Ok(dec.v.columns(rank, n - rank).into_owned())
}

/// Orthonormal basis of the numerical range (column space).
pub fn range_space<T: Real>(m: &ComplexMatrix<T>, threshold: T) -> Result<ComplexMatrix<T>> {
    let dec = svd(m)?;
    let rank = numerical_rank(&dec.sigma, threshold)?;
    Ok(dec.u.columns(0, rank).into_owned())
}

/// Unitary `n×n` matrix whose leading columns span the given orthonormal
/// columns (in order, up to unimodular factors).
pub fn complete_basis<T: Real>(cols: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = cols.nrows();
    let k = cols.ncols();
    if k == 0 {
        return identity(n);
    }
    let mut aug = zeros::<T>(n, k + n);
    aug.columns_mut(0, k).copy_from(cols);
    aug.columns_mut(k, n).copy_from(&identity::<T>(n));
    let qr = aug.qr();
    let mut q = qr.q();
    // Fix phases so the leading columns equal the inputs, not just span them.
    for j in 0..k.min(n) {
        let p = phase(q.column(j).dotc(&cols.column(j)));
        let col = q.column(j) * p;
        q.set_column(j, &col);
    }
    q
}

/// Complex Schur form `m = q · r · q*` with `r` upper triangular.
pub fn schur<T: Real>(m: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok((identity(0), zeros(0, 0)));
    }
    let (q, mut r) = match Schur::try_new(m.clone(), <T as Real>::epsilon(), MAX_SWEEPS) {
        Some(dec) => dec.unpack(),
        None => schur_rotated(m)?,
    };
    for j in 0..n {
        for i in (j + 1)..n {
            r[(i, j)] = Complex::new(T::zero(), T::zero());
        }
    }
    Ok((q, r))
}

/// Retries the QR iteration on `w*·m·w` for a few fixed unitaries `w`;
/// shifts occasionally cycle on matrices with repeated eigenvalues.
fn schur_rotated<T: Real>(m: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    use rand::SeedableRng;
    for attempt in 0..4u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5c4u64 + attempt);
        let w = random_unitary::<T, _>(&mut rng, m.nrows());
        if let Some(dec) = Schur::try_new(w.adjoint() * m * &w, <T as Real>::epsilon(), MAX_SWEEPS) {
            let (q, r) = dec.unpack();
            return Ok((w * q, r));
        }
    }
    Err(Error::EigensolverFailure)
}

/// Eigenvalues in Schur order.
pub fn eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<Cx<T>>> {
    let (_, r) = schur(m)?;
    Ok((0..r.nrows()).map(|i| r[(i, i)]).collect())
}

/// Matrix of independent standard complex Gaussians (`E|z|² = 1`).
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> ComplexMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // Column-major fill order is part of the reproducibility contract.
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(lit(re * scale), lit(im * scale))
    })
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector<T> {
    let m = gaussian_matrix::<T, R>(rng, n, 1);
    m.column(0).into_owned()
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal pushed into `Q`.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let z = gaussian_matrix::<T, R>(rng, n, n);
    orthonormalize(&z)
}

/// Unitary factor of the QR decomposition, normalized so that `R` has a
/// positive real diagonal. Maps unitaries to themselves up to rounding.
pub fn orthonormalize<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let qr = m.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let p = phase(r[(j, j)]);
        let col = q.column(j) * p;
        q.set_column(j, &col);
    }
    q
}

/// Cayley transform `(I − Ω/2)^{-1}(I + Ω/2)`, unitary for skew-Hermitian `Ω`.
pub fn cayley<T: Real>(omega: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = require_square(omega)?;
    let half = omega * Complex::new(lit::<T>(0.5), T::zero());
    let minus = identity::<T>(n) - &half;
    let plus = identity::<T>(n) + half;
    minus
        .lu()
        .solve(&plus)
        .ok_or_else(|| Error::InvalidParams("singular Cayley denominator".into()))
}

/// Sum computed by recursive halving; the grouping depends only on the length.
pub fn pairwise_sum<T: Real>(xs: &[Cx<T>]) -> Cx<T> {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &z| acc + z);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Block-diagonal direct sum.
pub fn direct_sum<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros::<T>(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// `‖u·u* − I‖_F`.
pub fn unitarity_residual<T: Real>(u: &ComplexMatrix<T>) -> T {
    let n = u.nrows();
    frobenius(&(u * u.adjoint() - identity::<T>(n)))
}
