//! Constructions of complex symmetric operators together with explicit
//! conjugations, and of the classical counterexamples.

pub mod binormal;
pub mod defect_one;
pub mod degree2;
pub mod model_space;
pub mod normal_rank_one;
pub mod partial_isometry;
pub mod volterra;
pub mod zoo;

pub use binormal::{
    binormal_assemble, binormal_certificate, binormal_conjugation, binormal_triangularize, Atom, AtomCase,
    BinormalAtoms,
};
pub use defect_one::{defect_one_certify, defect_one_decompose, DefectOne};
pub use degree2::{degree2_conjugation, degree2_fit, Block, Degree2Canonical};
pub use model_space::{blaschke_model_space, Alpha, BlaschkeProduct, ModelSpaceBundle, DEFAULT_QUADRATURE};
pub use normal_rank_one::normal_rank_one;
pub use partial_isometry::{partial_isometry_counterexample, refute_counterexample, PartialIsometryFixture};
pub use volterra::volterra_discretize;
pub use zoo::{zoo_sample, ZooKind};

use crate::conjugation::{symmetrize, Conjugation};
use crate::error::{Error, Result};
use crate::scalar::{ComplexMatrix, ComplexVector, Real};

/// The matrix of `f ↦ ⟨f, v⟩·u`, i.e. `u·v*`.
pub fn rank_one_operator<T: Real>(u: &ComplexVector<T>, v: &ComplexVector<T>) -> Result<ComplexMatrix<T>> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u * v.adjoint())
}

/// If `c` certifies `d` then `w·s·wᵀ` certifies `w·d·w*` for unitary `w`.
pub(crate) fn pullback<T: Real>(w: &ComplexMatrix<T>, c: &Conjugation<T>) -> Conjugation<T> {
    Conjugation::from_exact(symmetrize(&(w * c.matrix() * w.transpose())))
}
