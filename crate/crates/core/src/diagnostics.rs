//! Necessary conditions for complex symmetry.
//!
//! Each test either finds two quantities that every C-symmetric operator
//! must have equal, and reports them as an [`ObstructionWitness`], or returns
//! `Unknown`. None of them ever certifies.
//!
//! All of them rest on the same observation: if `t = C t* C` then `C` maps
//! eigenvectors (and kernel flags) of `t` onto those of `t*` for the
//! conjugate eigenvalue, isometrically and preserving the moduli of inner
//! products.

use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, inner, numerical_rank, require_square, schur, svd};
use crate::scalar::{lit, modulus, ComplexMatrix, ComplexVector, Cx, Real};
use crate::tolerance::Tolerance;
use crate::verdict::{ObstructionWitness, UnknownReason, Verdict, WitnessLocation};

pub const KERNEL_DIM_TEST: &str = "kernel_dim_test";
pub const KERNEL_CHAIN_TEST: &str = "kernel_chain_test";
pub const SIMPLE_EIG_PAIRS_TEST: &str = "simple_eig_pairs_test";
pub const TRANSPOSE_TRACE_TEST: &str = "transpose_trace_test";

/// Eigenvalues closer than this multiple of `σ_max` are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

pub const DEFAULT_MAX_WORD_LEN: usize = 6;

/// An eigenvalue with a one-dimensional eigenspace, together with unit
/// eigenvectors of `t` (for `λ`) and of `t*` (for `conj(λ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigPair<T: Real> {
    pub eigenvalue: Cx<T>,
    pub right_unit_vector: ComplexVector<T>,
    pub adjoint_unit_vector: ComplexVector<T>,
    pub geometric_multiplicity: usize,
    /// Number of computed eigenvalues merged into this one.
    pub algebraic_multiplicity: usize,
}

/// Spectral data shared by the eigenvector-based test and the eigenphase
/// construction.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum<T: Real> {
    /// Eigenvalue clusters with a trustworthy one-dimensional eigenspace,
    /// sorted by (re, im).
    pub pairs: Vec<EigPair<T>>,
    /// Number of eigenvalue clusters found.
    pub clusters: usize,
    /// True when every cluster is a single, reliably computed eigenvalue.
    pub all_simple: bool,
}

fn cluster_indices<T: Real>(eigs: &[Cx<T>], gap: T) -> Vec<Vec<usize>> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if modulus(eigs[i] - eigs[j]) <= gap {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Right and left eigenvectors of an upper-triangular matrix for the
/// diagonal entry `k`, by back and forward substitution.
fn triangular_eigvecs<T: Real>(r: &ComplexMatrix<T>, k: usize, floor: T) -> (ComplexVector<T>, ComplexVector<T>) {
    let n = r.nrows();
    let lambda = r[(k, k)];
    let guard = |d: Cx<T>| {
        if modulus(d) < floor {
            Complex::new(floor, T::zero())
        } else {
            d
        }
    };
    let mut y = ComplexVector::<T>::zeros(n);
    y[k] = Complex::new(T::one(), T::zero());
    for i in (0..k).rev() {
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in (i + 1)..=k {
            acc += r[(i, j)] * y[j];
        }
        y[i] = -acc / guard(r[(i, i)] - lambda);
    }
    // Row vector x with x·r = λ·x.
    let mut x = ComplexVector::<T>::zeros(n);
    x[k] = Complex::new(T::one(), T::zero());
    for j in (k + 1)..n {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in k..j {
            acc += x[i] * r[(i, j)];
        }
        x[j] = acc / guard(lambda - r[(j, j)]);
    }
    (y, x.map(|z| z.conj()))
}

pub(crate) fn spectrum<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Spectrum<T>> {
    let n = require_square(t)?;
    if n == 0 {
        return Ok(Spectrum {
            pairs: Vec::new(),
            clusters: 0,
            all_simple: true,
        });
    }
    let (q, r) = schur(t)?;
    let eigs: Vec<Cx<T>> = (0..n).map(|i| r[(i, i)]).collect();
    let sigma_max = linalg::spectral_norm(t)?;
    let fro = frobenius(t);
    let eps = <T as Real>::epsilon();
    let groups = cluster_indices(&eigs, lit::<T>(CLUSTER_GAP) * sigma_max);
    let reliability_cutoff = tol.rel.sqrt() * lit(1e-2);

    let mut pairs = Vec::new();
    let mut all_simple = true;
    for g in &groups {
        if g.len() == 1 {
            let k = g[0];
            let (y, xh) = triangular_eigvecs(&r, k, eps * fro.max(<T as Real>::min_positive()));
            let v = (&q * y).normalize();
            let w = (&q * xh).normalize();
            // An ill-conditioned simple eigenvalue gives eigenvectors that
            // belong to some nearby matrix rather than to t itself.
            let cos = modulus(inner(&v, &w));
            let gap = eigs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &e)| modulus(e - eigs[k]))
                .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b));
            let err = if n == 1 {
                T::zero()
            } else {
                eps * lit::<T>(n as f64) * fro / (cos.max(<T as Real>::min_positive()) * gap.max(<T as Real>::min_positive()))
            };
            if err <= reliability_cutoff {
                pairs.push(EigPair {
                    eigenvalue: eigs[k],
                    right_unit_vector: v,
                    adjoint_unit_vector: w,
                    geometric_multiplicity: 1,
                    algebraic_multiplicity: 1,
                });
            } else {
                all_simple = false;
            }
            continue;
        }
        all_simple = false;
        let size = lit::<T>(g.len() as f64);
        let center = g.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &i| acc + eigs[i])
            / Complex::new(size, T::zero());
        let shifted = t - ComplexMatrix::<T>::identity(n, n) * center;
        let dec = svd(&shifted)?;
        let threshold = tol.rank_threshold(sigma_max);
        match numerical_rank(&dec.sigma, threshold) {
            Ok(rank) if rank + 1 == n => pairs.push(EigPair {
                eigenvalue: center,
                right_unit_vector: dec.v.column(n - 1).into_owned(),
                adjoint_unit_vector: dec.u.column(n - 1).into_owned(),
                geometric_multiplicity: 1,
                algebraic_multiplicity: g.len(),
            }),
            // Multidimensional eigenspace or ambiguous rank: does not participate.
            _ => {}
        }
    }
    pairs.sort_by(|a, b| {
        a.eigenvalue
            .re
            .partial_cmp(&b.eigenvalue.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.eigenvalue.im.partial_cmp(&b.eigenvalue.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(Spectrum {
        pairs,
        clusters: groups.len(),
        all_simple,
    })
}

/// Eigenvalues of `t` with one-dimensional eigenspaces and their matched
/// eigenvectors of `t` and `t*`.
pub fn eig_pairs<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Vec<EigPair<T>>> {
    Ok(spectrum(t, tol)?.pairs)
}

/// Modulus-Gram test on one-dimensional eigenspaces.
///
/// If `t = C t* C` and `t v = λ v`, then `t*(C v) = conj(λ)·C v`, so `C`
/// sends a unit eigenvector `v_λ` to a unimodular multiple of the unit
/// eigenvector `w_λ` of `t*` for `conj(λ)` whenever that eigenspace is
/// one-dimensional. Since `|⟨Cx, Cy⟩| = |⟨x, y⟩|`, every pair must satisfy
/// `|⟨v_λ, v_μ⟩| = |⟨w_λ, w_μ⟩|`.
pub fn simple_eig_pairs_test<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Verdict<T>> {
    let pairs = eig_pairs(t, tol)?;
    let threshold = tol.separation(T::one());
    let mut worst: Option<ObstructionWitness<T>> = None;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let (a, b) = (&pairs[i], &pairs[j]);
            let left = modulus(inner(&a.right_unit_vector, &b.right_unit_vector));
            let right = modulus(inner(&a.adjoint_unit_vector, &b.adjoint_unit_vector));
            let gap = (left - right).abs();
            if gap > threshold && worst.as_ref().is_none_or(|w| gap > w.gap()) {
                worst = Some(ObstructionWitness {
                    test_name: SIMPLE_EIG_PAIRS_TEST,
                    left_value: left,
                    right_value: right,
                    location: WitnessLocation::Pair(i, j),
                    values: vec![a.eigenvalue, b.eigenvalue],
                });
            }
        }
    }
    Ok(match worst {
        Some(w) => Verdict::not_cso(w),
        None => Verdict::unknown(SIMPLE_EIG_PAIRS_TEST, T::zero(), UnknownReason::Inconclusive),
    })
}

fn orth_difference<T: Real>(
    current: &ComplexMatrix<T>,
    previous: &ComplexMatrix<T>,
) -> Result<Option<ComplexVector<T>>> {
    // Component of span(current) orthogonal to span(previous), when 1-dimensional.
    if current.ncols() != previous.ncols() + 1 {
        return Ok(None);
    }
    let n = current.nrows();
    let proj = ComplexMatrix::<T>::identity(n, n) - previous * previous.adjoint();
    let b = proj * current;
    let dec = svd(&b)?;
    Ok(Some(dec.u.column(0).into_owned()))
}

/// Kernel-flag test.
///
/// `C` maps `ker tⁱ` onto `ker (t*)ⁱ` for every `i`, and so maps
/// `ker tⁱ ⊖ ker tⁱ⁻¹` onto `ker (t*)ⁱ ⊖ ker (t*)ⁱ⁻¹`. Where both differences
/// are lines spanned by unit `x` and `y`, `C x` is a unimodular multiple of `y`
/// and `‖t x‖ = ‖t* C x‖ = ‖t* y‖`.
pub fn kernel_chain_test<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Verdict<T>> {
    let n = require_square(t)?;
    let scale = linalg::spectral_norm(t)?;
    if scale == T::zero() {
        return Ok(Verdict::unknown(KERNEL_CHAIN_TEST, T::zero(), UnknownReason::Inconclusive));
    }
    let t_adj = t.adjoint();
    let threshold = tol.rel.sqrt() * scale;
    let mut power = ComplexMatrix::<T>::identity(n, n);
    let mut power_scale = T::one();
    let mut prev_k = ComplexMatrix::<T>::zeros(n, 0);
    let mut prev_k_adj = ComplexMatrix::<T>::zeros(n, 0);
    for i in 1..=n {
        power = &power * t;
        power_scale *= scale;
        let dec = svd(&power)?;
        // Pure relative threshold so the verdict is invariant under t ↦ c·t.
        let rank = numerical_rank(&dec.sigma, tol.rel * power_scale)?;
        // ker tⁱ and ker (t*)ⁱ come from the same decomposition, so their
        // dimensions agree by construction for square t.
        let kernel = dec.v.columns(rank, n - rank).into_owned();
        let kernel_adj = dec.u.columns(rank, n - rank).into_owned();
        if kernel.ncols() == prev_k.ncols() {
            break;
        }
        if let (Some(x), Some(y)) = (orth_difference(&kernel, &prev_k)?, orth_difference(&kernel_adj, &prev_k_adj)?) {
            let left = (t * &x).norm();
            let right = (&t_adj * &y).norm();
            if (left - right).abs() > threshold {
                return Ok(Verdict::not_cso(ObstructionWitness {
                    test_name: KERNEL_CHAIN_TEST,
                    left_value: left,
                    right_value: right,
                    location: WitnessLocation::Chain(i),
                    values: Vec::new(),
                }));
            }
        }
        prev_k = kernel;
        prev_k_adj = kernel_adj;
    }
    Ok(Verdict::unknown(KERNEL_CHAIN_TEST, T::zero(), UnknownReason::Inconclusive))
}

/// Trace-word test.
///
/// A C-symmetric `t` satisfies `t = s tᵀ s*` and `t* = s conj(t) s*` with `s`
/// unitary, so every word `w` has `tr w(t, t*) = tr w(tᵀ, conj t)`. Since
/// `w(tᵀ, conj t) = (w̃(t, t*))ᵀ` for the reversed word `w̃`, the test
/// compares the traces of each word and its reversal.
pub fn transpose_trace_test<T: Real>(
    t: &ComplexMatrix<T>,
    max_word_len: usize,
    tol: &Tolerance<T>,
) -> Result<Verdict<T>> {
    let n = require_square(t)?;
    if max_word_len < 2 {
        return Err(Error::InvalidParams(format!(
            "max_word_len must be at least 2, got {max_word_len}"
        )));
    }
    let scale = linalg::spectral_norm(t)?;
    if scale == T::zero() {
        return Ok(Verdict::unknown(TRANSPOSE_TRACE_TEST, T::zero(), UnknownReason::Inconclusive));
    }
    let letters = [t.clone(), t.adjoint()];
    let traces = word_traces(&letters, max_word_len);
    for len in 2..=max_word_len {
        let threshold = tol.separation(T::one()) * lit::<T>(n as f64) * scale.powi(len as i32);
        let mut words: Vec<&String> = traces.keys().filter(|w| w.len() == len).collect();
        words.sort();
        for w in words {
            let rev: String = w.chars().rev().collect();
            if rev <= *w {
                continue;
            }
            let (a, b) = (traces[w], traces[&rev]);
            let d = a - b;
            if modulus(d) > threshold {
                let (left, right) = if d.re.abs() >= d.im.abs() { (a.re, b.re) } else { (a.im, b.im) };
                return Ok(Verdict::not_cso(ObstructionWitness {
                    test_name: TRANSPOSE_TRACE_TEST,
                    left_value: left,
                    right_value: right,
                    location: WitnessLocation::Word(w.clone()),
                    values: vec![a, b],
                }));
            }
        }
    }
    Ok(Verdict::unknown(TRANSPOSE_TRACE_TEST, T::zero(), UnknownReason::Inconclusive))
}

/// Traces of all words of length `1..=max_len` over `letters`, keyed by the
/// word spelled with `a`, `b`, ...
fn word_traces<T: Real>(letters: &[ComplexMatrix<T>], max_len: usize) -> HashMap<String, Cx<T>> {
    fn trace_of_product<T: Real>(p: &ComplexMatrix<T>, x: &ComplexMatrix<T>) -> Cx<T> {
        let n = p.nrows();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc += p[(i, j)] * x[(j, i)];
            }
        }
        acc
    }
    let names: Vec<char> = (0..letters.len()).map(|i| (b'a' + i as u8) as char).collect();
    let mut out = HashMap::new();
    let mut frontier: Vec<(String, ComplexMatrix<T>)> = Vec::new();
    for (c, m) in names.iter().zip(letters) {
        out.insert(c.to_string(), m.trace());
        frontier.push((c.to_string(), m.clone()));
    }
    for len in 2..=max_len {
        let last = len == max_len;
        let mut next = Vec::new();
        for (w, p) in &frontier {
            for (c, m) in names.iter().zip(letters) {
                let word = format!("{w}{c}");
                if last {
                    out.insert(word, trace_of_product(p, m));
                } else {
                    let prod = p * m;
                    out.insert(word.clone(), prod.trace());
                    next.push((word, prod));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Compares `dim ker t` with `dim ker t*` using singular values cut at
/// `tol.rel·σ_max`.
pub fn kernel_dim_test<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Verdict<T>> {
    let (dim_ker, dim_ker_adj) = kernel_dims(t, tol)?;
    if dim_ker != dim_ker_adj {
        return Ok(Verdict::not_cso(ObstructionWitness {
            test_name: KERNEL_DIM_TEST,
            left_value: lit(dim_ker as f64),
            right_value: lit(dim_ker_adj as f64),
            location: WitnessLocation::None,
            values: Vec::new(),
        }));
    }
    Ok(Verdict::unknown(KERNEL_DIM_TEST, T::zero(), UnknownReason::Inconclusive))
}

/// `(dim ker t, dim ker t*)` by numerical rank.
pub fn kernel_dims<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<(usize, usize)> {
    let n = require_square(t)?;
    let s = linalg::singular_values(t)?;
    let s_adj = linalg::singular_values(&t.adjoint())?;
    let sigma_max = s.first().copied().unwrap_or_else(T::zero);
    let thr = tol.rel * sigma_max;
    let rank = numerical_rank(&s, thr)?;
    let rank_adj = numerical_rank(&s_adj, thr)?;
    Ok((n - rank, n - rank_adj))
}

/// True when `t*t` is an orthogonal projection.
pub fn is_partial_isometry<T: Real>(t: &ComplexMatrix<T>, tol: &Tolerance<T>) -> bool {
    if t.nrows() != t.ncols() {
        return false;
    }
    let p = t.adjoint() * t;
    let bound = tol.rel * frobenius(&p).max(T::one()) + tol.abs;
    frobenius(&(&p * &p - &p)) <= bound && frobenius(&(p.adjoint() - &p)) <= bound
}
