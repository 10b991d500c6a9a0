//! Seeded random samples from the operator classes covered by the builders.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::binormal::binormal_assemble;
use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, gaussian_vector, random_unitary, zeros};
use crate::scalar::{lit, ComplexMatrix, Real};

pub const MAX_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZooKind {
    /// `size/2` atoms (at least one), so the matrix has even dimension.
    Binormal,
    /// Gaussian 2×2; `size` is ignored.
    TwoByTwo,
    /// `W·P` with `W` Haar unitary and `P` an orthogonal projection. A
    /// missing rank is drawn uniformly from `0..=dim` per sample.
    PartialIsometry { dim: usize, rank: Option<usize> },
    Normal,
    /// `[[0, a, 0], [0, 0, b], [0, 0, 0]]`.
    Nilpotent3 { a: f64, b: f64 },
    /// `Q·[[l₁I, X], [0, l₂I]]·Q*`.
    Degree2,
}

impl fmt::Display for ZooKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZooKind::Binormal => f.write_str("binormal"),
            ZooKind::TwoByTwo => f.write_str("two_by_two"),
            ZooKind::PartialIsometry { dim, rank: Some(r) } => write!(f, "partial_isometry({dim},{r})"),
            ZooKind::PartialIsometry { dim, rank: None } => write!(f, "partial_isometry({dim})"),
            ZooKind::Normal => f.write_str("normal"),
            ZooKind::Nilpotent3 { a, b } => write!(f, "nilpotent3({a},{b})"),
            ZooKind::Degree2 => f.write_str("degree2"),
        }
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidParams(format!("unknown zoo kind {s:?}"))
}

/// Accepts `binormal`, `two_by_two`, `normal`, `degree2`,
/// `partial_isometry(dim, rank)`, `partial_isometry(dim)` and `nilpotent3(a, b)`.
impl FromStr for ZooKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| bad(s))?;
                let args: Vec<&str> = inner.split(',').map(str::trim).collect();
                (&s[..open], args)
            }
            None => (s, Vec::new()),
        };
        let wild = |a: &str| a.is_empty() || a == "·" || a == "*" || a == "_";
        match (name, args.as_slice()) {
            ("binormal", []) => Ok(ZooKind::Binormal),
            ("two_by_two", []) => Ok(ZooKind::TwoByTwo),
            ("normal", []) => Ok(ZooKind::Normal),
            ("degree2", []) => Ok(ZooKind::Degree2),
            ("partial_isometry", [d]) => Ok(ZooKind::PartialIsometry {
                dim: d.parse().map_err(|_| bad(s))?,
                rank: None,
            }),
            ("partial_isometry", [d, r]) => Ok(ZooKind::PartialIsometry {
                dim: d.parse().map_err(|_| bad(s))?,
                rank: if wild(r) { None } else { Some(r.parse().map_err(|_| bad(s))?) },
            }),
            ("nilpotent3", [a, b]) => Ok(ZooKind::Nilpotent3 {
                a: a.parse().map_err(|_| bad(s))?,
                b: b.parse().map_err(|_| bad(s))?,
            }),
            _ => Err(bad(s)),
        }
    }
}

pub fn zoo_sample<T: Real>(kind: ZooKind, seed: u64, size: usize) -> Result<ComplexMatrix<T>> {
    if !(1..=MAX_SIZE).contains(&size) {
        return Err(Error::InvalidParams(format!("size must be in 1..={MAX_SIZE}, got {size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Complex::new(T::zero(), T::zero());
    match kind {
        ZooKind::Binormal => {
            let m = (size / 2).max(1);
            let lists: Vec<Vec<Complex<T>>> = (0..4)
                .map(|_| gaussian_vector::<T, _>(&mut rng, m).iter().copied().collect())
                .collect();
            binormal_assemble(&lists[0], &lists[1], &lists[2], &lists[3])
        }
        ZooKind::TwoByTwo => Ok(gaussian_matrix(&mut rng, 2, 2)),
        ZooKind::PartialIsometry { dim, rank } => {
            if !(1..=MAX_SIZE).contains(&dim) {
                return Err(Error::InvalidParams(format!("dim must be in 1..={MAX_SIZE}, got {dim}")));
            }
            let rank = match rank {
                Some(r) if r > dim => {
                    return Err(Error::InvalidParams(format!("rank {r} exceeds dim {dim}")));
                }
                Some(r) => r,
                None => rng.random_range(0..=dim),
            };
            let w: ComplexMatrix<T> = random_unitary(&mut rng, dim);
            let basis: ComplexMatrix<T> = random_unitary(&mut rng, dim);
            let range = basis.columns(0, rank);
            let p = &range * range.adjoint();
            Ok(w * p)
        }
        ZooKind::Normal => {
            let q: ComplexMatrix<T> = random_unitary(&mut rng, size);
            let d: DVector<Complex<T>> = gaussian_vector(&mut rng, size);
            Ok(&q * ComplexMatrix::from_diagonal(&d) * q.adjoint())
        }
        ZooKind::Nilpotent3 { a, b } => {
            let mut t = zeros::<T>(3, 3);
            t[(0, 1)] = Complex::new(lit(a), T::zero());
            t[(1, 2)] = Complex::new(lit(b), T::zero());
            Ok(t)
        }
        ZooKind::Degree2 => {
            let n = size;
            let k = rng.random_range(0..=n);
            let q: ComplexMatrix<T> = random_unitary(&mut rng, n);
            let x: ComplexMatrix<T> = gaussian_matrix(&mut rng, n, n);
            let roots: ComplexMatrix<T> = gaussian_matrix(&mut rng, 2, 1);
            let (l1, l2) = match rng.random_range(0..3) {
                0 => (roots[0], roots[0]),
                1 => (roots[0], zero),
                _ => (roots[0], roots[1]),
            };
            let core = ComplexMatrix::from_fn(n, n, |i, j| match (i == j, i < k, j < k) {
                (true, true, _) => l1,
                (true, false, _) => l2,
                (false, true, false) => x[(i, j)],
                _ => zero,
            });
            Ok(&q * core * q.adjoint())
        }
    }
}
