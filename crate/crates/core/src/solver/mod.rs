//! Certificate construction: eigenphase assembly, unitary-manifold search,
//! and the full decision pipeline.

mod eigenphase;
mod pipeline;
mod search;

pub use eigenphase::{eigenphase_construct, EIGENPHASE};
pub use pipeline::{decide, decide_with, Decision, DecideOptions, StageRecord, DIRECT_SUM_SPLIT};
pub use search::{uecsm_search, MANIFOLD_SEARCH};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::verdict::Verdict;

/// Budget and acceptance thresholds for the certificate search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig<T: Real> {
    pub restarts: usize,
    /// Iteration budget per restart.
    pub max_iters: usize,
    pub seed: u64,
    /// A certificate is accepted when its C-symmetry residual is at most this.
    pub accept_tol: T,
    /// Residuals above this are reported as a stalled search.
    pub fail_tol: T,
}

impl<T: Real> Default for SolveConfig<T> {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iters: 2000,
            seed: 0,
            accept_tol: lit(1e-8),
            fail_tol: lit(1e-6),
        }
    }
}

impl<T: Real> SolveConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be at least 1".into()));
        }
        if !(self.accept_tol <= self.fail_tol) || !(self.accept_tol >= T::zero()) {
            return Err(Error::InvalidParams(format!(
                "need 0 <= accept_tol <= fail_tol (got {} and {})",
                self.accept_tol, self.fail_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eigenphase,
    ManifoldSearch,
    BuilderDispatch,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eigenphase => "eigenphase",
            Method::ManifoldSearch => "manifold_search",
            Method::BuilderDispatch => "builder_dispatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome<T: Real> {
    pub verdict: Verdict<T>,
    pub best_residual: T,
    pub iterations_used: usize,
    pub method: Method,
}
