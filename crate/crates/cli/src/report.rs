use std::fmt::Write;
use std::time::Duration;

use csym_core::json::{ConjugationJson, LocationJson, VerdictJson, WitnessJson};
use csym_core::solver::Decision;
use csym_core::Conjugation64;
use serde::Serialize;

use crate::io::InputFile;
use crate::settings::{ConfigJson, Settings};

#[derive(Debug, Serialize)]
pub struct InputJson {
    pub path: String,
    pub sha256: String,
}

impl InputJson {
    pub fn new(f: &InputFile) -> Self {
        Self {
            path: f.path.display().to_string(),
            sha256: f.sha256.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StageJson {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Option<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub input: InputJson,
    pub dim: usize,
    pub verdict: VerdictJson,
    pub stages: Vec<StageJson>,
    pub config: ConfigJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<f64>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl CheckReport {
    pub fn new(input: &InputFile, dim: usize, d: &Decision<f64>, settings: &Settings, total: Duration) -> Self {
        let stages = d
            .stages
            .iter()
            .map(|s| StageJson {
                name: s.name.to_string(),
                // Certificates appear once, on the final verdict.
                verdict: s.verdict.as_ref().map(|v| VerdictJson {
                    certificate: None,
                    ..VerdictJson::from_verdict(v)
                }),
                error: s.error.as_ref().map(|e| e.to_string()),
                elapsed_ms: settings.timing.then(|| ms(s.elapsed)),
            })
            .collect();
        Self {
            command: "check",
            input: InputJson::new(input),
            dim,
            verdict: VerdictJson::from_verdict(&d.verdict),
            stages,
            config: settings.config.clone(),
            total_ms: settings.timing.then(|| ms(total)),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {} (sha256 {})", self.input.path, self.input.sha256);
        let _ = writeln!(out, "dim: {}", self.dim);
        out += &verdict_text(&self.verdict);
        let _ = writeln!(out, "stages:");
        for s in &self.stages {
            let outcome = match (&s.verdict, &s.error) {
                (Some(v), _) => stage_outcome(v),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => "skipped".into(),
            };
            let timing = s.elapsed_ms.map(|t| format!(" [{t:.3} ms]")).unwrap_or_default();
            let _ = writeln!(out, "  {}: {outcome}{timing}", s.name);
        }
        out += &self.config.text();
        if let Some(t) = self.total_ms {
            let _ = writeln!(out, "total: {t:.3} ms");
        }
        out
    }
}

fn stage_outcome(v: &VerdictJson) -> String {
    let mut s = v.status.clone();
    if let Some(r) = &v.reason {
        let _ = write!(s, " ({r})");
    }
    if let Some(w) = &v.witness {
        let _ = write!(s, ", {}", witness_text(w));
    }
    if let Some(r) = v.residual {
        let _ = write!(s, ", residual {r:e}");
    }
    s
}

fn location_text(l: &LocationJson) -> String {
    match l {
        LocationJson::Pair { i, j } => format!("pair ({i}, {j})"),
        LocationJson::Chain { index } => format!("chain index {index}"),
        LocationJson::Word { word } => format!("word {word}"),
        LocationJson::None => "-".into(),
    }
}

fn witness_text(w: &WitnessJson) -> String {
    let values: Vec<String> = w.values.iter().map(|p| pair_text(*p)).collect();
    format!(
        "witness {} vs {} at {} [{}]",
        w.left_value,
        w.right_value,
        location_text(&w.location),
        values.join(", ")
    )
}

pub fn pair_text(p: [f64; 2]) -> String {
    format!("{}{:+}i", p[0], p[1])
}

pub fn conjugation_text(c: &ConjugationJson) -> String {
    let mut out = String::new();
    for i in 0..c.s.rows {
        let row: Vec<String> = (0..c.s.cols).map(|j| pair_text(c.s.data[i * c.s.cols + j])).collect();
        let _ = writeln!(out, "  [{}]", row.join(", "));
    }
    out
}

pub fn verdict_text(v: &VerdictJson) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", v.status);
    let _ = writeln!(out, "test: {}", v.test);
    match v.residual {
        Some(r) => {
            let _ = writeln!(out, "residual: {r:e}");
        }
        None => {
            let _ = writeln!(out, "residual: none");
        }
    }
    if let Some(r) = &v.reason {
        let _ = writeln!(out, "reason: {r}");
    }
    if let Some(w) = &v.witness {
        let _ = writeln!(out, "{}", witness_text(w));
    }
    if let Some(c) = &v.certificate {
        let _ = writeln!(out, "certificate s:");
        out += &conjugation_text(c);
    }
    out
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub matrix: InputJson,
    pub conjugation: InputJson,
    pub csym_residual: f64,
    pub unitarity_residual: f64,
    pub symmetry_residual: f64,
    pub certified: bool,
    pub config: ConfigJson,
}

impl VerifyReport {
    pub fn new(m: &InputFile, c: &InputFile, conj: &Conjugation64, residual: f64, settings: &Settings) -> Self {
        Self {
            command: "verify",
            matrix: InputJson::new(m),
            conjugation: InputJson::new(c),
            csym_residual: residual,
            unitarity_residual: conj.unitarity_residual(),
            symmetry_residual: conj.symmetry_residual(),
            certified: residual <= settings.options.tol.rel,
            config: settings.config.clone(),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "matrix: {} (sha256 {})", self.matrix.path, self.matrix.sha256);
        let _ = writeln!(out, "conjugation: {} (sha256 {})", self.conjugation.path, self.conjugation.sha256);
        let _ = writeln!(out, "csym_residual: {:e}", self.csym_residual);
        let _ = writeln!(out, "unitarity_residual: {:e}", self.unitarity_residual);
        let _ = writeln!(out, "symmetry_residual: {:e}", self.symmetry_residual);
        let _ = writeln!(out, "certified: {}", self.certified);
        out += &self.config.text();
        out
    }
}
