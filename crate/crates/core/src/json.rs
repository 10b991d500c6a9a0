//! JSON interchange formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major:
//! `{"rows": n, "cols": m, "data": [[re, im], ...]}`. Values are always
//! written as `f64`, whatever scalar type produced them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::conjugation::{validate_conjugation, Conjugation};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, ComplexMatrix, Cx, Real};
use crate::tolerance::Tolerance;
use crate::verdict::{ObstructionWitness, Verdict, WitnessLocation};

pub type Pair = [f64; 2];

pub fn pair<T: Real>(z: Cx<T>) -> Pair {
    [to_f64(z.re), to_f64(z.im)]
}

pub fn from_pair<T: Real>(p: Pair) -> Result<Cx<T>> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Complex::new(lit(p[0]), lit(p[1])))
}

/// Non-finite values have no JSON representation and become `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Pair>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(pair(m[(i, j)]));
            }
        }
        Self { rows, cols, data }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "matrix declares {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let entries = self.data.iter().map(|&p| from_pair::<T>(p)).collect::<Result<Vec<_>>>()?;
        Ok(ComplexMatrix::from_row_slice(self.rows, self.cols, &entries))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationJson {
    pub kind: String,
    pub s: MatrixJson,
}

impl ConjugationJson {
    pub const KIND: &'static str = "conjugation";

    pub fn from_conjugation<T: Real>(c: &Conjugation<T>) -> Self {
        Self {
            kind: Self::KIND.into(),
            s: MatrixJson::from_matrix(c.matrix()),
        }
    }

    /// Parses and validates the stored matrix.
    pub fn to_conjugation<T: Real>(&self, tol: &Tolerance<T>) -> Result<Conjugation<T>> {
        if self.kind != Self::KIND {
            return Err(Error::Parse(format!("expected kind \"conjugation\", found {:?}", self.kind)));
        }
        validate_conjugation(self.s.to_matrix()?, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocationJson {
    Pair { i: usize, j: usize },
    Chain { index: usize },
    Word { word: String },
    None,
}

impl From<&WitnessLocation> for LocationJson {
    fn from(l: &WitnessLocation) -> Self {
        match l {
            WitnessLocation::Pair(i, j) => LocationJson::Pair { i: *i, j: *j },
            WitnessLocation::Chain(index) => LocationJson::Chain { index: *index },
            WitnessLocation::Word(word) => LocationJson::Word { word: word.clone() },
            WitnessLocation::None => LocationJson::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub test: String,
    pub left_value: f64,
    pub right_value: f64,
    pub location: LocationJson,
    pub values: Vec<Pair>,
}

impl WitnessJson {
    pub fn from_witness<T: Real>(w: &ObstructionWitness<T>) -> Self {
        Self {
            test: w.test_name.into(),
            left_value: to_f64(w.left_value),
            right_value: to_f64(w.right_value),
            location: (&w.location).into(),
            values: w.values.iter().map(|&z| pair(z)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub status: String,
    pub test: String,
    pub witness: Option<WitnessJson>,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConjugationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl VerdictJson {
    pub fn from_verdict<T: Real>(v: &Verdict<T>) -> Self {
        Self {
            status: v.status.as_str().into(),
            test: v.test.into(),
            witness: v.obstruction.as_ref().map(WitnessJson::from_witness),
            residual: finite(to_f64(v.residual)),
            certificate: v.certificate.as_ref().map(ConjugationJson::from_conjugation),
            reason: v.reason.map(|r| r.as_str().into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeJson {
    pub zeros: Vec<Pair>,
    pub factor: Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub u1: Pair,
    pub v: Pair,
    pub u2: Pair,
    /// Mass of the atom.
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinormalAtomsJson {
    pub atoms: Vec<AtomJson>,
}
