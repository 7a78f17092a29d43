use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::ConfusionMatrix;
use super::svg::{line_chart, Series};
use crate::error::{Error, Result};
use crate::fmtnum::sig;
use crate::gates::Explanation;
use crate::nn::{EpochRecord, Evaluation};

/// What the gate experiments add on top of the learning curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub explanation: Explanation,
    /// Accuracy of the crisp (cut) network on the training split, when every
    /// layer is squashing.
    pub crisp_train_accuracy: Option<f64>,
    /// Accuracy of the extracted inequalities on the training split.
    pub explanation_train_accuracy: f64,
}

/// Learning curves and final confusion matrices of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: ExperimentConfig,
    /// Hidden activation label.
    pub activation: String,
    /// 0-based indices of the layers whose `beta` is traced.
    pub beta_layers: Vec<usize>,
    pub initial_train: Evaluation,
    pub initial_test: Option<Evaluation>,
    pub records: Vec<EpochRecord>,
    pub confusion_train: ConfusionMatrix,
    pub confusion_test: Option<ConfusionMatrix>,
    pub gate: Option<GateSummary>,
}

impl ExperimentReport {
    pub fn final_record(&self) -> &EpochRecord {
        self.records.last().expect("a report has at least one epoch")
    }

    pub fn final_test_accuracy(&self) -> Option<f64> {
        self.final_record().test_acc
    }

    pub fn csv_header(&self) -> String {
        let mut cols: Vec<String> = ["epoch", "train_loss", "test_loss", "train_acc", "test_acc", "seconds"]
            .map(String::from)
            .to_vec();
        cols.extend(self.beta_layers.iter().map(|k| format!("beta_layer{}", k + 1)));
        cols.join(",")
    }

    /// One row per epoch; floats with 9 significant digits, a missing test
    /// split leaves its columns empty.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| sig(v, 9)).unwrap_or_default();
        let mut out = self.csv_header();
        out.push('\n');
        for r in &self.records {
            let mut row = vec![
                r.epoch.to_string(),
                sig(r.train_loss, 9),
                opt(r.test_loss),
                sig(r.train_acc, 9),
                opt(r.test_acc),
                sig(r.seconds, 9),
            ];
            row.extend(r.betas.iter().map(|b| sig(*b, 9)));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// All runs of one activation comparison, in configuration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: ExperimentConfig,
    pub runs: Vec<ExperimentReport>,
}

impl BenchmarkReport {
    pub fn run(&self, activation: &str) -> Option<&ExperimentReport> {
        self.runs.iter().find(|r| r.activation == activation)
    }

    /// `activation,train_acc,test_acc,train_loss,test_loss,mean_seconds,final_beta`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("activation,train_acc,test_acc,train_loss,test_loss,mean_seconds,final_beta\n");
        for r in &self.runs {
            let f = r.final_record();
            let mean = r.records.iter().map(|e| e.seconds).sum::<f64>() / r.records.len() as f64;
            let opt = |v: Option<f64>| v.map(|v| sig(v, 9)).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.activation,
                sig(f.train_acc, 9),
                opt(f.test_acc),
                sig(f.train_loss, 9),
                opt(f.test_loss),
                sig(mean, 9),
                opt(f.betas.first().copied()),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [Self::Csv, Self::Json, Self::Svg];
}

fn write(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn curves(runs: &[&ExperimentReport], prefix: bool) -> [Vec<Series>; 4] {
    let label = |r: &ExperimentReport, what: &str| {
        if prefix {
            format!("{} {what}", r.activation)
        } else {
            what.to_string()
        }
    };
    let pts = |r: &ExperimentReport, f: &dyn Fn(&EpochRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        r.records.iter().filter_map(|e| f(e).map(|v| (e.epoch as f64, v))).collect()
    };
    let mut acc = Vec::new();
    let mut loss = Vec::new();
    let mut time = Vec::new();
    let mut beta = Vec::new();
    for &r in runs {
        acc.push(Series::new(label(r, "train"), pts(r, &|e| Some(e.train_acc))));
        if r.records.iter().any(|e| e.test_acc.is_some()) {
            acc.push(Series::new(label(r, "test"), pts(r, &|e| e.test_acc)));
        }
        loss.push(Series::new(label(r, "train"), pts(r, &|e| Some(e.train_loss))));
        if r.records.iter().any(|e| e.test_loss.is_some()) {
            loss.push(Series::new(label(r, "test"), pts(r, &|e| e.test_loss)));
        }
        time.push(Series::new(label(r, "seconds"), pts(r, &|e| Some(e.seconds))));
        for (i, k) in r.beta_layers.iter().enumerate() {
            beta.push(Series::new(
                label(r, &format!("layer {}", k + 1)),
                pts(r, &|e| e.betas.get(i).copied()),
            ));
        }
    }
    [acc, loss, time, beta]
}

fn emit_charts(dir: &Path, stem: &str, title: &str, runs: &[&ExperimentReport], written: &mut Vec<PathBuf>) -> Result<()> {
    let [acc, loss, time, beta] = curves(runs, runs.len() > 1);
    write(dir, &format!("{stem}_accuracy.svg"), &line_chart(&format!("{title}: accuracy"), "epoch", "accuracy", &acc), written)?;
    write(dir, &format!("{stem}_loss.svg"), &line_chart(&format!("{title}: loss"), "epoch", "cross-entropy", &loss), written)?;
    write(dir, &format!("{stem}_time.svg"), &line_chart(&format!("{title}: time per epoch"), "epoch", "seconds", &time), written)?;
    if !beta.is_empty() {
        write(dir, &format!("{stem}_beta.svg"), &line_chart(&format!("{title}: beta"), "epoch", "beta", &beta), written)?;
    }
    Ok(())
}

/// Writes `<name>.csv`, `<name>.json` and the `<name>_*.svg` charts (plus
/// `<name>_explanation.txt` for gate runs) into `dir`. Returns the paths.
pub fn emit_report(report: &ExperimentReport, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    let stem = report.name.as_str();
    for f in formats {
        match f {
            ReportFormat::Csv => write(dir, &format!("{stem}.csv"), &report.to_csv(), &mut written)?,
            ReportFormat::Json => {
                write(dir, &format!("{stem}.json"), &report.to_json(), &mut written)?;
                if let Some(g) = &report.gate {
                    write(dir, &format!("{stem}_explanation.txt"), &g.explanation.to_text(), &mut written)?;
                    write(dir, &format!("{stem}_explanation.json"), &g.explanation.to_json()?, &mut written)?;
                }
            }
            ReportFormat::Svg => emit_charts(dir, stem, stem, &[report], &mut written)?,
        }
    }
    Ok(written)
}

/// Per-run files as in [`emit_report`] plus `bench_summary.csv`,
/// `bench.json` and overlaid `bench_*.svg` charts.
pub fn emit_benchmark(bench: &BenchmarkReport, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    for r in &bench.runs {
        written.extend(emit_report(r, dir, formats)?);
    }
    for f in formats {
        match f {
            ReportFormat::Csv => write(dir, "bench_summary.csv", &bench.summary_csv(), &mut written)?,
            ReportFormat::Json => write(dir, "bench.json", &bench.to_json(), &mut written)?,
            ReportFormat::Svg => {
                let runs: Vec<&ExperimentReport> = bench.runs.iter().collect();
                emit_charts(dir, "bench", "activation benchmark", &runs, &mut written)?;
            }
        }
    }
    Ok(written)
}
