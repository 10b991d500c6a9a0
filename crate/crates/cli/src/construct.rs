use std::path::Path;

use clap::ValueEnum;
use csym_core::builders::{
    binormal_certificate, binormal_conjugation, blaschke_model_space, degree2_conjugation, normal_rank_one,
    partial_isometry_counterexample, rank_one_operator, refute_counterexample, volterra_discretize, Alpha,
    BinormalAtoms, BlaschkeProduct, DEFAULT_QUADRATURE,
};
use csym_core::json::{from_pair, pair, BinormalAtomsJson, BlaschkeJson, ConjugationJson, MatrixJson, Pair, VerdictJson};
use csym_core::linalg::{frobenius, identity};
use csym_core::scalar::Cx;
use csym_core::{csym_residual, ComplexMatrix64, ComplexVector64, Conjugation64, Status};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::io::{ensure_dir, read_input, sha256_hex, write_json};
use crate::report::verdict_text;
use crate::settings::{ConfigJson, Settings};
use crate::{CliError, EXIT_CSO, EXIT_VERIFICATION_FAILED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Class {
    Binormal,
    Degree2,
    RankOne,
    NormalRankOne,
    ModelSpace,
    Volterra,
    PisomCounterexample,
}

impl Class {
    fn name(self) -> &'static str {
        match self {
            Class::Binormal => "binormal",
            Class::Degree2 => "degree2",
            Class::RankOne => "rank_one",
            Class::NormalRankOne => "normal_rank_one",
            Class::ModelSpace => "model_space",
            Class::Volterra => "volterra",
            Class::PisomCounterexample => "pisom_counterexample",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BinormalParams {
    Lists {
        n11: Vec<Pair>,
        n12: Vec<Pair>,
        n21: Vec<Pair>,
        n22: Vec<Pair>,
    },
    Atoms(BinormalAtomsJson),
    Preset {
        preset: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixParams {
    matrix: MatrixJson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RankOneParams {
    u: Vec<Pair>,
    v: Vec<Pair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalRankOneParams {
    eigs: Vec<Pair>,
    theta: Vec<Pair>,
    a: Pair,
    v: Vec<Pair>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlphaParam {
    Named(String),
    Value(Pair),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpaceParams {
    phi: BlaschkeJson,
    lambda: Pair,
    /// `"canonical"` or a unimodular `[re, im]`. When omitted, canonical if
    /// `φ(λ) ≠ 0` and `1` otherwise.
    alpha: Option<AlphaParam>,
    quadrature_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SizeParams {
    n: usize,
}

/// One named quantity compared against its bound.
#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ConstructReport {
    pub command: &'static str,
    pub class: &'static str,
    pub params_sha256: String,
    pub files: Vec<String>,
    pub checks: Vec<CheckJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub data: serde_json::Map<String, serde_json::Value>,
    pub verified: bool,
    pub config: ConfigJson,
}

impl ConstructReport {
    fn text(&self) -> String {
        let mut out = format!("class: {}\nparams sha256: {}\nfiles: {}\n", self.class, self.params_sha256, self.files.join(", "));
        for c in &self.checks {
            out += &format!(
                "check {}: {:e} (bound {:e}) {}\n",
                c.name,
                c.value,
                c.bound,
                if c.pass { "ok" } else { "FAILED" }
            );
        }
        for (k, v) in &self.data {
            out += &format!("{k}: {v}\n");
        }
        if let Some(v) = &self.verdict {
            out += &verdict_text(v);
        }
        out += &format!("verified: {}\n", self.verified);
        out += &self.config.text();
        out
    }
}

struct Outcome {
    files: Vec<(&'static str, serde_json::Value)>,
    checks: Vec<CheckJson>,
    verdict: Option<VerdictJson>,
    data: serde_json::Map<String, serde_json::Value>,
    /// Extra requirement beyond the checks, e.g. that a counterexample is refuted.
    expectation: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            checks: Vec::new(),
            verdict: None,
            data: serde_json::Map::new(),
            expectation: true,
        }
    }

    fn check(&mut self, name: &'static str, value: f64, bound: f64) {
        self.checks.push(CheckJson {
            name,
            value,
            bound,
            pass: value <= bound,
        });
    }

    fn matrix(&mut self, file: &'static str, m: &ComplexMatrix64) {
        self.files.push((file, json(&MatrixJson::from_matrix(m))));
    }

    fn conjugation(&mut self, t: &ComplexMatrix64, c: &Conjugation64, bound: f64) -> Result<(), CliError> {
        self.files.push(("C.json", json(&ConjugationJson::from_conjugation(c))));
        self.check("csym_residual", csym_residual(t, c)?, bound);
        self.check("conjugation_unitarity", c.unitarity_residual(), bound);
        self.check("conjugation_symmetry", c.symmetry_residual(), bound);
        Ok(())
    }

    fn datum(&mut self, key: &str, value: serde_json::Value) {
        self.data.insert(key.into(), value);
    }
}

fn json<S: Serialize>(v: &S) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn params<P: DeserializeOwned>(raw: &[u8]) -> Result<P, CliError> {
    serde_json::from_slice(raw).map_err(|e| CliError::Input(format!("invalid params: {e}")))
}

fn complexes(ps: &[Pair]) -> Result<Vec<Cx<f64>>, CliError> {
    Ok(ps.iter().map(|&p| from_pair(p)).collect::<Result<Vec<_>, _>>()?)
}

fn column(ps: &[Pair]) -> Result<ComplexVector64, CliError> {
    Ok(ComplexVector64::from_vec(complexes(ps)?))
}

fn build(class: Class, raw: &[u8], settings: &Settings) -> Result<Outcome, CliError> {
    let tol = settings.options.tol;
    let bound = tol.rel;
    let mut out = Outcome::new();
    match class {
        Class::Binormal => {
            let (t, c) = match params::<BinormalParams>(raw)? {
                BinormalParams::Lists { n11, n12, n21, n22 } => {
                    let (t, c, _) = binormal_certificate(
                        &complexes(&n11)?,
                        &complexes(&n12)?,
                        &complexes(&n21)?,
                        &complexes(&n22)?,
                        &tol,
                    )?;
                    (t, c)
                }
                BinormalParams::Atoms(j) => {
                    let atoms = BinormalAtoms::from_json(&j)?;
                    (atoms.triangular(), binormal_conjugation(&atoms, &tol)?)
                }
                BinormalParams::Preset { preset } if preset == "sqrt_of_normal" => {
                    let r = |x: f64| Cx::new(x, 0.0);
                    let (t, c, _) = binormal_certificate(
                        &[r(1.0), r(-1.0)],
                        &[r(2.0), r(3.0)],
                        &[r(0.0), r(0.0)],
                        &[r(-1.0), r(1.0)],
                        &tol,
                    )?;
                    (t, c)
                }
                BinormalParams::Preset { preset } => {
                    return Err(CliError::Input(format!("unknown preset {preset:?}")));
                }
            };
            out.matrix("T.json", &t);
            out.conjugation(&t, &c, bound)?;
        }
        Class::Degree2 | Class::RankOne => {
            let t = if class == Class::Degree2 {
                let p: MatrixParams = params(raw)?;
                if p.matrix.rows != p.matrix.cols {
                    return Err(CliError::Input("matrix is not square".into()));
                }
                p.matrix.to_matrix()?
            } else {
                let p: RankOneParams = params(raw)?;
                rank_one_operator(&column(&p.u)?, &column(&p.v)?)?
            };
            let (c, canon) = degree2_conjugation(&t, &tol)?;
            out.matrix("T.json", &t);
            out.conjugation(&t, &c, bound)?;
            out.check("canonical_reconstruction", frobenius(&(canon.reconstruct() - &t)), bound * frobenius(&t).max(1.0));
            out.datum("alpha", json(&pair(canon.alpha)));
            out.datum("beta", json(&pair(canon.beta)));
        }
        Class::NormalRankOne => {
            let p: NormalRankOneParams = params(raw)?;
            let (t, c) = normal_rank_one(
                &complexes(&p.eigs)?,
                &complexes(&p.theta)?,
                from_pair(p.a)?,
                &column(&p.v)?,
                &tol,
            )?;
            out.matrix("T.json", &t);
            out.conjugation(&t, &c, bound)?;
        }
        Class::ModelSpace => {
            let p: ModelSpaceParams = params(raw)?;
            let phi = BlaschkeProduct::from_json(&p.phi)?;
            let lambda = from_pair(p.lambda)?;
            let alpha = match p.alpha {
                Some(AlphaParam::Named(s)) if s == "canonical" => Alpha::Canonical,
                Some(AlphaParam::Named(s)) => return Err(CliError::Input(format!("unknown alpha {s:?}"))),
                Some(AlphaParam::Value(a)) => Alpha::Value(from_pair(a)?),
                None if phi.eval(lambda).norm() > tol.abs => Alpha::Canonical,
                None => Alpha::Value(Cx::new(1.0, 0.0)),
            };
            let b = blaschke_model_space(&phi, lambda, alpha, p.quadrature_points.unwrap_or(DEFAULT_QUADRATURE), &tol)?;
            out.matrix("S.json", &b.s_lambda);
            out.matrix("U.json", &b.u_lambda);
            out.conjugation(&b.s_lambda, &b.c, bound)?;
            out.check("u_unitarity", b.checks.unitarity, bound);
            out.check("q_minus_ck", b.checks.q_vs_ck, bound);
            out.check("u_csym_residual", b.checks.csym_u, bound);
            out.check("shift_identity", b.checks.shift_identity, bound);
            if let Some(r) = b.checks.rank_one_identity {
                out.check("rank_one_identity", r, bound);
            }
            out.check("basis_gram", b.checks.gram, bound);
            out.datum("degree", json(&b.degree));
            out.datum("lambda", json(&pair(b.lambda)));
            out.datum("alpha", json(&pair(b.alpha)));
            out.datum("phi_at_lambda", json(&pair(b.phi_at_lambda)));
            out.datum("k_lambda", json(&b.k_lambda.iter().map(|&z| pair(z)).collect::<Vec<_>>()));
            out.datum("q_lambda", json(&b.q_lambda.iter().map(|&z| pair(z)).collect::<Vec<_>>()));
        }
        Class::Volterra => {
            let p: SizeParams = params(raw)?;
            let (v, c) = volterra_discretize(p.n)?;
            out.matrix("V.json", &v);
            out.conjugation(&v, &c, bound)?;
        }
        Class::PisomCounterexample => {
            let p: SizeParams = params(raw)?;
            let f = partial_isometry_counterexample::<f64>(p.n)?;
            out.matrix("T.json", &f.t);
            out.matrix("A.json", &f.a);
            let gram = f.a.adjoint() * &f.a + f.b.adjoint() * &f.b;
            out.check("column_orthonormality", frobenius(&(gram - identity::<f64>(3))), bound);
            out.check("projection_idempotence", frobenius(&(&f.p * &f.p - &f.p)), bound);
            let v = refute_counterexample(&f, &settings.options)?;
            out.expectation = v.status == Status::NotCso;
            out.verdict = Some(VerdictJson::from_verdict(&v));
        }
    }
    Ok(out)
}

pub fn run(class: Class, params_arg: &str, dir: &Path, settings: &Settings) -> Result<u8, CliError> {
    let raw = if params_arg.trim_start().starts_with('{') {
        params_arg.as_bytes().to_vec()
    } else {
        read_input(Path::new(params_arg))?.bytes
    };
    let out = build(class, &raw, settings)?;
    ensure_dir(dir)?;
    for (name, value) in &out.files {
        write_json(dir, name, value)?;
    }
    let mut files: Vec<String> = out.files.iter().map(|(n, _)| n.to_string()).collect();
    files.push("report.json".into());
    let verified = out.expectation && out.checks.iter().all(|c| c.pass);
    let report = ConstructReport {
        command: "construct",
        class: class.name(),
        params_sha256: sha256_hex(&raw),
        files,
        checks: out.checks,
        verdict: out.verdict,
        data: out.data,
        verified,
        config: settings.config.clone(),
    };
    write_json(dir, "report.json", &report)?;
    settings.emit(&report, || report.text())?;
    Ok(if verified { EXIT_CSO } else { EXIT_VERIFICATION_FAILED })
}
