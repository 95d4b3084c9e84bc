//! Table reproduction and the `n_add` sweep.

use std::path::Path;
use std::time::Instant;

use nbw_core::gnn::{evaluate, train, EpochStats, GraphInput, TrainConfig};
use nbw_core::{
    build_balanced_dataset, write_dataset, Dataset, DatasetSpec, InitMode, Input, Model, PropertyKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DatasetRole, ExperimentConfig};
use crate::error::Result;
use crate::report::{mean_std, CellReport, ExperimentReport};

pub type Progress<'a> = &'a (dyn Fn(&str) + Sync);

/// Silent progress sink.
pub fn quiet(_: &str) {}

/// Encodes a dataset into network inputs.
pub fn prepare_inputs(ds: &Dataset, n_add: usize, init_mode: InitMode) -> Vec<Input> {
    ds.encoded_with::<f64>(n_add, init_mode)
        .iter()
        .map(GraphInput::from_encoded)
        .collect()
}

/// Builds (and optionally saves) a dataset.
pub fn generate(spec: &DatasetSpec, save_dir: Option<&Path>) -> Result<Dataset> {
    let ds = build_balanced_dataset(spec)?;
    if let Some(dir) = save_dir {
        std::fs::create_dir_all(dir)?;
        write_dataset(&ds, dir.join(format!("{}.{}", spec.name(), nbw_core::dataset::DATASET_EXTENSION)))?;
    }
    Ok(ds)
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub model: Model,
    pub history: Vec<EpochStats>,
}

/// Independent training runs, one per seed, executed in parallel. Results
/// come back in seed order.
pub fn train_runs(
    inputs: &[Input],
    input_width: usize,
    base: &TrainConfig,
    seeds: &[u64],
) -> Result<Vec<RunResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = TrainConfig { seed, ..*base };
            let out = train(inputs, input_width, &cfg)?;
            Ok(RunResult {
                seed,
                model: out.model,
                history: out.history,
            })
        })
        .collect()
}

/// Short test set label, e.g. `500_10_25`.
pub fn test_label(size: usize, (n_min, n_max): (usize, usize)) -> String {
    format!("{size}_{n_min}_{n_max}")
}

/// Trains `runs` models on `train_set` and scores each on every test set.
fn run_cells(
    cfg: &ExperimentConfig,
    kind: PropertyKind,
    train_name: &str,
    train_inputs: &[Input],
    tests: &[(String, Vec<Input>)],
    n_add: usize,
) -> Result<Vec<CellReport>> {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..cfg.runs).map(|r| cfg.run_seed(r)).collect();
    let results = train_runs(train_inputs, 2 + n_add, &cfg.train, &seeds)?;
    let elapsed = start.elapsed().as_secs_f64();
    tests
        .iter()
        .map(|(label, inputs)| {
            let accs = results
                .iter()
                .map(|r| evaluate(&r.model, inputs))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(CellReport::from_runs(
                kind,
                train_name.to_string(),
                label.clone(),
                accs,
                seeds.clone(),
                elapsed,
            ))
        })
        .collect()
}

fn test_sets(cfg: &ExperimentConfig, kind: PropertyKind, save_dir: Option<&Path>, n_add: usize) -> Result<Vec<(String, Dataset, Vec<Input>)>> {
    cfg.test_ranges
        .iter()
        .map(|&range| {
            let spec = cfg.dataset_spec(DatasetRole::Test, kind, cfg.test_size, range);
            let ds = generate(&spec, save_dir)?;
            let inputs = prepare_inputs(&ds, n_add, cfg.init_mode);
            Ok((test_label(cfg.test_size, range), ds, inputs))
        })
        .collect()
}

/// Accuracy table: for each property and training size, train `runs`
/// models on `property_size_3_9` and evaluate on every test range.
pub fn table1(cfg: &ExperimentConfig, save_dir: Option<&Path>, progress: Progress) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("table1", cfg.clone());
    for &kind in &cfg.properties {
        progress(&format!("{kind}: generating test sets"));
        let tests: Vec<(String, Vec<Input>)> = test_sets(cfg, kind, save_dir, cfg.n_add)?
            .into_iter()
            .map(|(l, _, i)| (l, i))
            .collect();
        for &size in &cfg.sizes {
            let spec = cfg.dataset_spec(DatasetRole::Train, kind, size, cfg.train_range);
            progress(&format!("{}: generating", spec.name()));
            let ds = generate(&spec, save_dir)?;
            let inputs = prepare_inputs(&ds, cfg.n_add, cfg.init_mode);
            progress(&format!("{}: training {} runs", spec.name(), cfg.runs));
            let cells = run_cells(cfg, kind, &spec.name(), &inputs, &tests, cfg.n_add)?;
            for c in &cells {
                progress(&format!(
                    "{} -> {}: {:.1} ± {:.1}",
                    c.train_set,
                    c.test_set,
                    100.0 * c.mean,
                    100.0 * c.std
                ));
            }
            report.cells.extend(cells);
        }
    }
    Ok(report)
}

/// Accuracy averaged over properties for one `n_add` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_add: usize,
    pub mean_accuracy: f64,
    pub per_property: Vec<(PropertyKind, f64)>,
}

/// Trains on `property_sweepsize_3_9` for every `n_add` value and scores on
/// the first test range. The dataset is generated once per property and
/// re-encoded for each `n_add`.
pub fn sweep_nadd(
    cfg: &ExperimentConfig,
    save_dir: Option<&Path>,
    progress: Progress,
) -> Result<(ExperimentReport, Vec<SweepRow>)> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("sweep-nadd", cfg.clone());
    let range = *cfg
        .test_ranges
        .first()
        .ok_or_else(|| crate::error::HarnessError::Validation("no test ranges".into()))?;
    let mut data = Vec::new();
    for &kind in &cfg.properties {
        let spec = cfg.dataset_spec(DatasetRole::Train, kind, cfg.sweep_size, cfg.train_range);
        progress(&format!("{}: generating", spec.name()));
        let train_ds = generate(&spec, save_dir)?;
        let test_spec = cfg.dataset_spec(DatasetRole::Test, kind, cfg.test_size, range);
        let test_ds = generate(&test_spec, save_dir)?;
        data.push((kind, spec.name(), train_ds, test_ds));
    }
    let mut rows = Vec::new();
    for &n_add in &cfg.sweep_n_add {
        let mut per_property = Vec::new();
        for (kind, name, train_ds, test_ds) in &data {
            let train_inputs = prepare_inputs(train_ds, n_add, cfg.init_mode);
            let tests = vec![(test_label(cfg.test_size, range), prepare_inputs(test_ds, n_add, cfg.init_mode))];
            let mut cells = run_cells(cfg, *kind, name, &train_inputs, &tests, n_add)?;
            let mut cell = cells.remove(0);
            cell.n_add = Some(n_add);
            cell.train_set = format!("{name}@n_add={n_add}");
            progress(&format!("n_add={n_add} {name}: {:.1}", 100.0 * cell.mean));
            per_property.push((*kind, cell.mean));
            report.cells.push(cell);
        }
        let (mean, _) = mean_std(&per_property.iter().map(|p| p.1).collect::<Vec<_>>());
        rows.push(SweepRow { n_add, mean_accuracy: mean, per_property });
    }
    Ok((report, rows))
}

/// Tab-separated plot data: `n_add`, mean accuracy, then one column per
/// property.
pub fn sweep_plot_data(rows: &[SweepRow]) -> String {
    let mut out = String::from("n_add\tmean");
    if let Some(first) = rows.first() {
        for (k, _) in &first.per_property {
            out.push('\t');
            out.push_str(k.name());
        }
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{}\t{:.6}", r.n_add, r.mean_accuracy));
        for (_, a) in &r.per_property {
            out.push_str(&format!("\t{a:.6}"));
        }
        out.push('\n');
    }
    out
}

/// For every training set with two test columns, how many runs scored at
/// least as well on the second (larger automata) as on the first.
pub fn generalization_summary(report: &ExperimentReport) -> Vec<(String, usize, usize)> {
    let labels: Vec<String> = report
        .config
        .test_ranges
        .iter()
        .map(|&r| test_label(report.config.test_size, r))
        .collect();
    if labels.len() < 2 {
        return Vec::new();
    }
    let mut trains: Vec<&str> = report.cells.iter().map(|c| c.train_set.as_str()).collect();
    trains.dedup();
    trains
        .into_iter()
        .filter_map(|t| {
            let small = report.cell(t, &labels[0])?;
            let large = report.cell(t, &labels[1])?;
            let wins = small
                .accuracies
                .iter()
                .zip(&large.accuracies)
                .filter(|(s, l)| l >= s)
                .count();
            Some((t.to_string(), wins, small.runs))
        })
        .collect()
}
