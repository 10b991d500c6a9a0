use std::fmt;

use crate::conjugation::Conjugation;
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Cso,
    NotCso,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Cso => "cso",
            Status::NotCso => "not_cso",
            Status::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where in the test an obstruction was found.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessLocation {
    /// Pair of eigenvalue indices (or constraint indices).
    Pair(usize, usize),
    /// Position in a kernel flag.
    Chain(usize),
    /// Word over `{t, t*}`, written with `a = t`, `b = t*`.
    Word(String),
    None,
}

/// Two quantities that must agree for any C-symmetric operator but do not.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionWitness<T: Real> {
    pub test_name: &'static str,
    pub left_value: T,
    pub right_value: T,
    pub location: WitnessLocation,
    /// Auxiliary values, e.g. the eigenvalues of the offending pair.
    pub values: Vec<Cx<T>>,
}

impl<T: Real> ObstructionWitness<T> {
    pub fn gap(&self) -> T {
        (self.left_value - self.right_value).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    /// The test is only a necessary condition and found nothing.
    Inconclusive,
    /// Preconditions of the method do not hold for this input.
    NotApplicable,
    RankDeterminationUnstable,
    /// Optimization stalled above the acceptance tolerance.
    SearchStalled,
}

impl UnknownReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnknownReason::Inconclusive => "inconclusive",
            UnknownReason::NotApplicable => "not_applicable",
            UnknownReason::RankDeterminationUnstable => "rank_determination_unstable",
            UnknownReason::SearchStalled => "search_stalled",
        }
    }
}

/// Outcome of a decision procedure.
///
/// The constructors enforce the pairing of status with payload: a CSO
/// verdict always carries a certificate, a NotCSO verdict always carries a
/// witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T: Real> {
    pub status: Status,
    pub test: &'static str,
    pub certificate: Option<Conjugation<T>>,
    pub obstruction: Option<ObstructionWitness<T>>,
    pub residual: T,
    pub reason: Option<UnknownReason>,
}

impl<T: Real> Verdict<T> {
    pub fn cso(test: &'static str, certificate: Conjugation<T>, residual: T) -> Self {
        Self {
            status: Status::Cso,
            test,
            certificate: Some(certificate),
            obstruction: None,
            residual,
            reason: None,
        }
    }

    pub fn not_cso(witness: ObstructionWitness<T>) -> Self {
        Self {
            status: Status::NotCso,
            test: witness.test_name,
            residual: witness.gap(),
            certificate: None,
            obstruction: Some(witness),
            reason: None,
        }
    }

    pub fn unknown(test: &'static str, residual: T, reason: UnknownReason) -> Self {
        Self {
            status: Status::Unknown,
            test,
            certificate: None,
            obstruction: None,
            residual,
            reason: Some(reason),
        }
    }

    pub fn is_cso(&self) -> bool {
        self.status == Status::Cso
    }

    pub fn is_not_cso(&self) -> bool {
        self.status == Status::NotCso
    }
}
