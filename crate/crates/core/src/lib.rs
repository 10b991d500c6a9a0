//! Deciding and certifying complex symmetry of square complex matrices.
//!
//! Everything is generic over the real field `T` ([`scalar::Real`], i.e.
//! `f32` or `f64`). The aliases below fix `T = f64`.

pub mod builders;
pub mod conjugation;
pub mod diagnostics;
pub mod error;
pub mod json;
pub mod linalg;
pub mod scalar;
pub mod solver;
pub mod tolerance;
pub mod verdict;

pub use conjugation::{canonical_conjugation, conj_apply, csym_residual, validate_conjugation, CanonicalKind};
pub use error::{Error, Result};
pub use solver::{decide, decide_with, DecideOptions, SolveConfig};
pub use verdict::{Status, UnknownReason};

pub type ComplexMatrix64 = scalar::ComplexMatrix<f64>;
pub type ComplexVector64 = scalar::ComplexVector<f64>;
pub type Conjugation64 = conjugation::Conjugation<f64>;
pub type Verdict64 = verdict::Verdict<f64>;
pub type Tolerance64 = tolerance::Tolerance<f64>;
pub type SolveConfig64 = solver::SolveConfig<f64>;
