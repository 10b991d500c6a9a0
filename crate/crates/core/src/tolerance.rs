use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Relative and absolute tolerances used by every residual check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T: Real> {
    pub rel: T,
    pub abs: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rel: lit(1e-8),
            abs: lit(1e-10),
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T) -> Result<Self> {
        if !(rel >= T::zero() && abs >= T::zero()) {
            return Err(Error::InvalidParams(format!(
                "tolerances must be nonnegative (rel = {rel}, abs = {abs})"
            )));
        }
        Ok(Self { rel, abs })
    }

    /// Tolerance with the given relative part and the default absolute floor.
    pub fn with_rel(rel: T) -> Result<Self> {
        Self::new(rel, Self::default().abs)
    }

    /// Cutoff below which a singular value counts as zero, for a matrix
    /// whose largest singular value (or other scale) is `scale`.
    pub fn rank_threshold(&self, scale: T) -> T {
        self.rel * scale + self.abs
    }

    /// Minimum gap between two quantities that an obstruction witness must
    /// exhibit. Computed eigenvectors and norms carry errors on the order of
    /// `sqrt(eps)` for mildly conditioned data, so witnesses are compared at
    /// `sqrt(rel)` relative to `scale` rather than at `rel`.
    pub fn separation(&self, scale: T) -> T {
        self.rel.sqrt() * scale + self.abs
    }
}
