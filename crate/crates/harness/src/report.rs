//! Experiment reports: one JSON record per line (a config line, then one
//! line per cell) and a rendered text table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nbw_core::PropertyKind;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Accuracy of one (training set, test set) pair over several runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub property: PropertyKind,
    pub train_set: String,
    pub test_set: String,
    /// Extra columns only sweeps use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_add: Option<usize>,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub accuracies: Vec<f64>,
    pub seeds: Vec<u64>,
    pub wall_clock_s: f64,
}

impl CellReport {
    pub fn from_runs(
        property: PropertyKind,
        train_set: String,
        test_set: String,
        accuracies: Vec<f64>,
        seeds: Vec<u64>,
        wall_clock_s: f64,
    ) -> Self {
        let (mean, std) = mean_std(&accuracies);
        Self {
            property,
            train_set,
            test_set,
            n_add: None,
            runs: accuracies.len(),
            mean,
            std,
            accuracies,
            seeds,
            wall_clock_s,
        }
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ReportLine {
    Config { command: String, config: Box<ExperimentConfig> },
    Cell(CellReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub command: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
}

impl ExperimentReport {
    pub fn new(command: &str, config: ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            config,
            cells: Vec::new(),
        }
    }

    pub fn cell(&self, train_set: &str, test_set: &str) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.train_set == train_set && c.test_set == test_set)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let head = ReportLine::Config {
            command: self.command.clone(),
            config: Box::new(self.config.clone()),
        };
        out.push_str(&serde_json::to_string(&head).expect("serializable"));
        out.push('\n');
        for c in &self.cells {
            out.push_str(&serde_json::to_string(&ReportLine::Cell(c.clone())).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut report: Option<ExperimentReport> = None;
        for (i, line) in text.lines().enumerate() {
            let parsed: ReportLine = serde_json::from_str(line).map_err(|e| {
                crate::error::HarnessError::Validation(format!("report line {}: {e}", i + 1))
            })?;
            match (parsed, report.as_mut()) {
                (ReportLine::Config { command, config }, None) => {
                    report = Some(ExperimentReport::new(&command, *config))
                }
                (ReportLine::Cell(c), Some(r)) => r.cells.push(c),
                _ => {
                    return Err(crate::error::HarnessError::Validation(format!(
                        "report line {}: unexpected record",
                        i + 1
                    )))
                }
            }
        }
        report.ok_or_else(|| crate::error::HarnessError::Validation("empty report".into()))
    }

    /// Accuracies in percent, `mean ± std` per cell; one row per training
    /// set and one column per test set.
    pub fn render_table(&self) -> String {
        let mut tests: Vec<&str> = Vec::new();
        let mut trains: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !tests.contains(&c.test_set.as_str()) {
                tests.push(&c.test_set);
            }
            if !trains.contains(&c.train_set.as_str()) {
                trains.push(&c.train_set);
            }
        }
        let width = trains.iter().map(|t| t.len()).max().unwrap_or(0).max(12);
        let mut out = String::new();
        let _ = write!(out, "{:width$}", "train \\ test");
        for t in &tests {
            let _ = write!(out, " | {t:>20}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(width + 23 * tests.len()));
        for tr in &trains {
            let _ = write!(out, "{tr:width$}");
            for te in &tests {
                match self.cell(tr, te) {
                    Some(c) => {
                        let _ = write!(out, " | {:>20}", format!("{:.1} ± {:.1}", 100.0 * c.mean, 100.0 * c.std));
                    }
                    None => {
                        let _ = write!(out, " | {:>20}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes `path` (JSON lines) and `path.txt` (rendered table).
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::File::create(path)?.write_all(self.to_jsonl().as_bytes())?;
        let mut txt = path.as_os_str().to_owned();
        txt.push(".txt");
        std::fs::write(txt, self.render_table())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_std() {
        let (m, s) = mean_std(&[0.8, 0.9, 1.0]);
        assert!((m - 0.9).abs() < 1e-12);
        assert!((s - 0.1).abs() < 1e-12);
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
    }

    #[test]
    fn jsonl_round_trip_and_table() {
        let mut r = ExperimentReport::new("table1", ExperimentConfig::default());
        r.cells.push(CellReport::from_runs(
            PropertyKind::InfB,
            "infb_250_3_9".into(),
            "500_3_9".into(),
            vec![0.9, 0.92],
            vec![1, 2],
            1.5,
        ));
        let text = r.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(ExperimentReport::from_jsonl(&text).unwrap(), r);
        let table = r.render_table();
        assert!(table.contains("infb_250_3_9"));
        assert!(table.contains("91.0 ± 1.4"), "{table}");
    }
}
