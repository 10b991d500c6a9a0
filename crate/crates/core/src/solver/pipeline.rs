use std::time::{Duration, Instant};

use super::eigenphase::eigenphase_with_accept;
use super::{uecsm_search, SolveConfig, SolveOutcome, EIGENPHASE, MANIFOLD_SEARCH};
use crate::conjugation::{csym_residual, validate_conjugation, Conjugation};
use crate::diagnostics::{
    kernel_chain_test, kernel_dim_test, simple_eig_pairs_test, transpose_trace_test, DEFAULT_MAX_WORD_LEN,
    KERNEL_CHAIN_TEST, KERNEL_DIM_TEST, SIMPLE_EIG_PAIRS_TEST, TRANSPOSE_TRACE_TEST,
};
use crate::error::{Error, Result};
use crate::linalg::require_square;
use crate::scalar::{all_finite, ComplexMatrix, Real};
use crate::tolerance::Tolerance;
use crate::verdict::{Status, UnknownReason, Verdict};

/// Stage that certifies a matrix which is block diagonal up to a
/// permutation of coordinates by certifying each block separately.
pub const DIRECT_SUM_SPLIT: &str = "direct_sum_split";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecideOptions<T: Real> {
    pub solve: SolveConfig<T>,
    pub tol: Tolerance<T>,
    pub max_word_len: usize,
}

impl<T: Real> Default for DecideOptions<T> {
    fn default() -> Self {
        Self {
            solve: SolveConfig::default(),
            tol: Tolerance::default(),
            max_word_len: DEFAULT_MAX_WORD_LEN,
        }
    }
}

/// One executed stage of the pipeline. Exactly one of `verdict` and
/// `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord<T: Real> {
    pub name: &'static str,
    pub verdict: Option<Verdict<T>>,
    pub error: Option<Error>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T: Real> {
    pub verdict: Verdict<T>,
    pub stages: Vec<StageRecord<T>>,
}

/// Decides complex symmetry of `t` with default tolerances.
pub fn decide<T: Real>(t: &ComplexMatrix<T>, cfg: &SolveConfig<T>) -> Result<Verdict<T>> {
    let opts = DecideOptions {
        solve: *cfg,
        ..DecideOptions::default()
    };
    decide_with(t, &opts).map(|d| d.verdict)
}

/// Runs the diagnostics, then the certificate constructions, stopping at
/// the first conclusive stage. Refutations only ever come from necessary
/// conditions; a failed search yields Unknown.
pub fn decide_with<T: Real>(t: &ComplexMatrix<T>, opts: &DecideOptions<T>) -> Result<Decision<T>> {
    require_square(t)?;
    if !all_finite(t) {
        return Err(Error::NonFinite);
    }
    opts.solve.validate()?;
    let mut run = Run {
        stages: Vec::new(),
        unstable: false,
        best_residual: <T as Real>::infinity(),
        accept_tol: opts.solve.accept_tol,
    };
    let tol = &opts.tol;

    let diagnostics: [(&'static str, Box<dyn Fn() -> Result<Verdict<T>> + '_>); 4] = [
        (KERNEL_DIM_TEST, Box::new(|| kernel_dim_test(t, tol))),
        (SIMPLE_EIG_PAIRS_TEST, Box::new(|| simple_eig_pairs_test(t, tol))),
        (KERNEL_CHAIN_TEST, Box::new(|| kernel_chain_test(t, tol))),
        (TRANSPOSE_TRACE_TEST, Box::new(|| transpose_trace_test(t, opts.max_word_len, tol))),
    ];
    for (name, stage) in diagnostics {
        if let Some(v) = run.stage(name, t, || stage())? {
            return Ok(run.finish(v));
        }
    }

    if let Some(v) = run.stage(EIGENPHASE, t, || {
        eigenphase_with_accept(t, tol, opts.solve.accept_tol).map(|o| o.verdict)
    })? {
        return Ok(run.finish(v));
    }

    let blocks = components(t);
    if blocks.len() > 1 {
        if let Some(v) = run.stage(DIRECT_SUM_SPLIT, t, || certify_blocks(t, &blocks, opts))? {
            return Ok(run.finish(v));
        }
    }

    if let Some(v) = run.stage(MANIFOLD_SEARCH, t, || uecsm_search(t, &opts.solve).map(|o| o.verdict))? {
        return Ok(run.finish(v));
    }

    let reason = if run.unstable {
        UnknownReason::RankDeterminationUnstable
    } else {
        run.stages
            .iter()
            .rev()
            .find_map(|s| s.verdict.as_ref().and_then(|v| v.reason))
            .unwrap_or(UnknownReason::Inconclusive)
    };
    let verdict = Verdict::unknown(MANIFOLD_SEARCH, run.best_residual, reason);
    Ok(run.finish(verdict))
}

struct Run<T: Real> {
    stages: Vec<StageRecord<T>>,
    unstable: bool,
    best_residual: T,
    accept_tol: T,
}

impl<T: Real> Run<T> {
    /// Executes a stage and returns its verdict if it is conclusive.
    fn stage(
        &mut self,
        name: &'static str,
        t: &ComplexMatrix<T>,
        f: impl FnOnce() -> Result<Verdict<T>>,
    ) -> Result<Option<Verdict<T>>> {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(v) => v,
            Err(e @ (Error::RankDeterminationUnstable { .. } | Error::EigensolverFailure)) => {
                if matches!(e, Error::RankDeterminationUnstable { .. }) {
                    self.unstable = true;
                }
                self.stages.push(StageRecord {
                    name,
                    verdict: None,
                    error: Some(e),
                    elapsed,
                });
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let verdict = match verdict.status {
            Status::Cso if !self.reverify(t, &verdict) => {
                Verdict::unknown(name, verdict.residual, UnknownReason::Inconclusive)
            }
            _ => verdict,
        };
        if verdict.status == Status::Unknown && verdict.residual.is_finite() && name != KERNEL_DIM_TEST {
            let certifying = matches!(name, EIGENPHASE | DIRECT_SUM_SPLIT | MANIFOLD_SEARCH);
            if certifying && verdict.residual < self.best_residual {
                self.best_residual = verdict.residual;
            }
        }
        let conclusive = verdict.status != Status::Unknown;
        self.stages.push(StageRecord {
            name,
            verdict: Some(verdict.clone()),
            error: None,
            elapsed,
        });
        Ok(conclusive.then_some(verdict))
    }

    fn reverify(&self, t: &ComplexMatrix<T>, v: &Verdict<T>) -> bool {
        let Some(c) = &v.certificate else { return false };
        let Ok(tol) = Tolerance::new(self.accept_tol.max(T::epsilon()), T::zero()) else {
            return false;
        };
        validate_conjugation(c.matrix().clone(), &tol).is_ok()
            && csym_residual(t, c).is_ok_and(|r| r <= self.accept_tol)
    }

    fn finish(self, verdict: Verdict<T>) -> Decision<T> {
        Decision {
            verdict,
            stages: self.stages,
        }
    }
}

/// Connected components of the graph with an edge `i ~ j` whenever
/// `t[i][j]` or `t[j][i]` is nonzero, each sorted, in order of smallest index.
fn components<T: Real>(t: &ComplexMatrix<T>) -> Vec<Vec<usize>> {
    let n = t.nrows();
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![root];
        label[root] = id;
        let mut next = 0;
        while next < members.len() {
            let i = members[next];
            next += 1;
            for j in 0..n {
                let zero = num_traits::Zero::is_zero(&t[(i, j)]) && num_traits::Zero::is_zero(&t[(j, i)]);
                if label[j] == usize::MAX && !zero {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn certify_block<T: Real>(b: &ComplexMatrix<T>, opts: &DecideOptions<T>) -> Result<SolveOutcome<T>> {
    if b.nrows() > 1 {
        let out = eigenphase_with_accept(b, &opts.tol, opts.solve.accept_tol);
        match out {
            Ok(o) if o.verdict.is_cso() => return Ok(o),
            Ok(_) | Err(Error::RankDeterminationUnstable { .. } | Error::EigensolverFailure) => {}
            Err(e) => return Err(e),
        }
    }
    uecsm_search(b, &opts.solve)
}

fn certify_blocks<T: Real>(t: &ComplexMatrix<T>, blocks: &[Vec<usize>], opts: &DecideOptions<T>) -> Result<Verdict<T>> {
    let n = t.nrows();
    let mut s = ComplexMatrix::<T>::zeros(n, n);
    for idx in blocks {
        let b = ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| t[(idx[i], idx[j])]);
        let out = certify_block(&b, opts)?;
        let Some(c) = out.verdict.certificate else {
            return Ok(Verdict::unknown(DIRECT_SUM_SPLIT, out.best_residual, UnknownReason::Inconclusive));
        };
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                s[(gi, gj)] = c.matrix()[(i, j)];
            }
        }
    }
    let c = Conjugation::from_exact(s);
    let residual = csym_residual(t, &c)?;
    Ok(Verdict::cso(DIRECT_SUM_SPLIT, c, residual))
}
