use std::path::Path;

use csym_core::builders::{zoo_sample, ZooKind};
use csym_core::json::{MatrixJson, VerdictJson};
use csym_core::{decide_with, Status};
use rayon::prelude::*;
use serde::Serialize;

use crate::io::{ensure_dir, write_json};
use crate::settings::{ConfigJson, Settings};
use crate::{CliError, EXIT_CSO};

#[derive(Debug, Default, Serialize)]
pub struct Counts {
    pub cso: usize,
    pub not_cso: usize,
    pub unknown: usize,
    pub error: usize,
}

#[derive(Debug, Serialize)]
pub struct SampleSummary {
    pub index: usize,
    pub seed: u64,
    pub status: String,
    pub test: String,
    pub residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ZooSummary {
    pub command: &'static str,
    pub kind: String,
    pub seed: u64,
    pub count: usize,
    pub size: usize,
    pub counts: Counts,
    pub samples: Vec<SampleSummary>,
    pub config: ConfigJson,
}

#[derive(Debug, Serialize)]
struct SampleFile {
    index: usize,
    seed: u64,
    matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl ZooSummary {
    fn text(&self) -> String {
        let c = &self.counts;
        let mut out = format!(
            "kind: {} (size {}, seed {}, count {})\ncso: {}\nnot_cso: {}\nunknown: {}\nerror: {}\n",
            self.kind, self.size, self.seed, self.count, c.cso, c.not_cso, c.unknown, c.error
        );
        out += &self.config.text();
        out
    }
}

pub fn run(kind: &str, count: usize, size: usize, dir: &Path, settings: &Settings) -> Result<u8, CliError> {
    let kind: ZooKind = kind.parse()?;
    if count == 0 {
        return Err(CliError::Input("--count must be positive".into()));
    }
    let base = settings.options.solve.seed;
    // Fail on bad parameters before spawning any work.
    zoo_sample::<f64>(kind, base, size)?;
    ensure_dir(dir)?;

    let samples: Vec<SampleFile> = (0..count)
        .into_par_iter()
        .map(|index| {
            let seed = base.wrapping_add(index as u64);
            let t = zoo_sample::<f64>(kind, seed, size).expect("parameters validated above");
            let (verdict, error) = match decide_with(&t, &settings.options) {
                Ok(d) => (Some(VerdictJson::from_verdict(&d.verdict)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SampleFile {
                index,
                seed,
                matrix: MatrixJson::from_matrix(&t),
                verdict,
                error,
            }
        })
        .collect();

    let mut counts = Counts::default();
    let mut rows = Vec::with_capacity(count);
    for s in &samples {
        write_json(dir, &format!("sample_{:04}.json", s.index), s)?;
        let (status, test, residual) = match &s.verdict {
            Some(v) => {
                match v.status.as_str() {
                    x if x == Status::Cso.as_str() => counts.cso += 1,
                    x if x == Status::NotCso.as_str() => counts.not_cso += 1,
                    _ => counts.unknown += 1,
                }
                (v.status.clone(), v.test.clone(), v.residual)
            }
            None => {
                counts.error += 1;
                ("error".to_string(), String::new(), None)
            }
        };
        rows.push(SampleSummary {
            index: s.index,
            seed: s.seed,
            status,
            test,
            residual,
        });
    }
    let summary = ZooSummary {
        command: "zoo",
        kind: kind.to_string(),
        seed: base,
        count,
        size,
        counts,
        samples: rows,
        config: settings.config.clone(),
    };
    write_json(dir, "summary.json", &summary)?;
    settings.emit(&summary, || summary.text())?;
    Ok(EXIT_CSO)
}
