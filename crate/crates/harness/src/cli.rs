//! Command line interface of `nbwgnn`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nbw_core::checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
use nbw_core::dataset::DATASET_EXTENSION;
use nbw_core::gnn::{evaluate, train, TrainConfig};
use nbw_core::{
    check_property, emptiness_subclass, read_dataset, write_dataset, InitMode, LassoWitness, Nbw,
    Property, PropertyKind, Transition,
};
use serde::Deserialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{self, generalization_summary, prepare_inputs, sweep_plot_data, Progress};

#[derive(Debug, Parser)]
#[command(name = "nbwgnn", version, about = "Balanced Büchi automaton datasets and GCN property classifiers")]
pub struct Cli {
    /// Base seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON experiment config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a balanced dataset file `property_d_nmin_nmax.nbwds`.
    Generate(GenerateArgs),
    /// Decide the properties of one automaton, or re-verify a dataset file.
    Check(CheckArgs),
    /// Train a model on a dataset file and write a checkpoint.
    Train(TrainArgs),
    /// Accuracy of a checkpoint on a dataset file.
    Eval(EvalArgs),
    /// Reproduce the accuracy table.
    Table1(Table1Args),
    /// Accuracy as a function of the number of extra node features.
    SweepNadd(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub property: PropertyKind,
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    /// State count range.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub n: Option<Vec<usize>>,
    /// Edge probability range.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub p: Option<Vec<f64>>,
    /// Acceptance probability range.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub pacc: Option<Vec<f64>>,
    #[arg(long)]
    pub symbols: Option<usize>,
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub n_add: Option<usize>,
    #[arg(long)]
    pub init: Option<InitMode>,
    #[arg(long)]
    pub max_attempts: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Inline automaton: {"n":2,"num_symbols":2,"transitions":[[0,1,1],...],"accepting":[1]}
    #[arg(long, conflicts_with = "file")]
    pub automaton: Option<String>,
    /// Dataset file; without --index every record is re-verified.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// 1-based record number within --file.
    #[arg(long, requires = "file")]
    pub index: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub target: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Must match the dataset's n_add when given.
    #[arg(long)]
    pub n_add: Option<usize>,
    #[arg(long)]
    pub init: Option<InitMode>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Training set sizes, e.g. 250,1000,10000,50000.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub properties: Option<Vec<PropertyKind>>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Also write every generated dataset here.
    #[arg(long)]
    pub save_datasets: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// n_add values, e.g. 0,1,2,3,4,5,6.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<usize>>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub properties: Option<Vec<PropertyKind>>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub save_datasets: Option<PathBuf>,
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn pair<T: Copy>(v: &Option<Vec<T>>) -> Option<(T, T)> {
    v.as_ref().map(|v| (v[0], v[1]))
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write, progress: Progress) -> Result<()> {
    let cfg = base_config(cli)?;
    match &cli.command {
        Command::Generate(a) => cmd_generate(cfg, a, cli.out.as_deref(), out),
        Command::Check(a) => cmd_check(a, out),
        Command::Train(a) => cmd_train(cfg, a, cli.seed, cli.out.as_deref(), out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Table1(a) => cmd_table1(cfg, a, cli.out.as_deref(), out, progress),
        Command::SweepNadd(a) => cmd_sweep(cfg, a, cli.out.as_deref(), out, progress),
    }
}

fn cmd_generate(mut cfg: ExperimentConfig, a: &GenerateArgs, dest: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    if let Some((lo, hi)) = pair(&a.p) {
        (cfg.p_min, cfg.p_max) = (lo, hi);
    }
    if let Some((lo, hi)) = pair(&a.pacc) {
        (cfg.pacc_min, cfg.pacc_max) = (lo, hi);
    }
    if let Some(s) = a.symbols {
        cfg.num_symbols = s;
    }
    if let Some(t) = a.target {
        cfg.target_symbol = t;
    }
    if let Some(k) = a.n_add {
        cfg.n_add = k;
    }
    if let Some(m) = a.init {
        cfg.init_mode = m;
    }
    if let Some(m) = a.max_attempts {
        cfg.max_attempts_per_slot = m;
    }
    let range = pair(&a.n).unwrap_or(cfg.train_range);
    let mut spec = cfg.dataset_spec(crate::config::DatasetRole::Train, a.property, a.size, range);
    // An explicit seed is used verbatim so files are reproducible from flags.
    spec.gen.seed = cfg.seed;
    let ds = nbw_core::build_balanced_dataset(&spec)?;
    let path = match dest {
        Some(p) if p.extension().is_some_and(|e| e == DATASET_EXTENSION) => p.to_path_buf(),
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            dir.join(format!("{}.{DATASET_EXTENSION}", spec.name()))
        }
        None => PathBuf::from(format!("{}.{DATASET_EXTENSION}", spec.name())),
    };
    write_dataset(&ds, &path)?;
    writeln!(out, "wrote {} ({} automata)", path.display(), ds.len())?;
    for (bucket, count) in ds.bucket_counts() {
        writeln!(out, "  {bucket}: {count}")?;
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineAutomaton {
    n: usize,
    #[serde(default = "two")]
    num_symbols: usize,
    #[serde(default)]
    transitions: Vec<(usize, usize, usize)>,
    #[serde(default)]
    accepting: Vec<usize>,
}

fn two() -> usize {
    2
}

/// Parses an inline automaton; errors carry line and column.
pub fn parse_inline_automaton(text: &str) -> Result<Nbw> {
    let raw: InlineAutomaton = serde_json::from_str(text)
        .map_err(|e| HarnessError::Validation(format!("cannot parse automaton at line {} column {}: {e}", e.line(), e.column())))?;
    Nbw::new(
        raw.n,
        raw.num_symbols,
        raw.transitions.into_iter().map(Transition::from),
        raw.accepting,
    )
    .map_err(|e| HarnessError::Validation(e.to_string()))
}

/// Property report for one automaton, one `key: value` per line.
pub fn describe(a: &Nbw, target: usize) -> Result<String> {
    let p = |k| Property::with_target(k, target);
    let empty = check_property(a, p(PropertyKind::IsEmpty))?;
    let min1b = check_property(a, p(PropertyKind::Min1B))?;
    let infb = check_property(a, p(PropertyKind::InfB))?;
    let mut s = format!("empty: {empty}\nmin1b: {min1b}\ninfb: {infb}\nsubclass: {:?}\n", emptiness_subclass(a));
    match a.min_accepting_cycle_length() {
        Some(l) => s.push_str(&format!("min_accepting_cycle_length: {l}\n")),
        None => s.push_str("min_accepting_cycle_length: none\n"),
    }
    match a.find_accepting_lasso() {
        Some(w) => s.push_str(&format!(
            "witness: prefix \"{}\" cycle \"{}\" states {:?} {:?}\n",
            LassoWitness::render_word(&w.prefix),
            LassoWitness::render_word(&w.cycle),
            w.prefix_states,
            w.cycle_states
        )),
        None => s.push_str("witness: none\n"),
    }
    Ok(s)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(text) = &a.automaton {
        let nbw = parse_inline_automaton(text)?;
        out.write_all(describe(&nbw, a.target)?.as_bytes())?;
        return Ok(());
    }
    let Some(file) = &a.file else {
        return Err(HarnessError::Validation("check needs --automaton or --file".into()));
    };
    let ds = read_dataset(file)?;
    let property = ds.header.spec.property;
    if let Some(i) = a.index {
        let rec = ds
            .records
            .get(i.wrapping_sub(1))
            .ok_or_else(|| HarnessError::Validation(format!("record {i} out of range 1..={}", ds.len())))?;
        writeln!(out, "record {i}: {} label={} bucket={}", rec.nbw, u8::from(rec.label), rec.bucket)?;
        out.write_all(describe(&rec.nbw, property.target_symbol)?.as_bytes())?;
        return Ok(());
    }
    let mut mismatches = Vec::new();
    for (i, rec) in ds.records.iter().enumerate() {
        let label = check_property(&rec.nbw, property)?;
        let bucket = nbw_core::bucket_of(&rec.nbw, property)?;
        if label != rec.label || bucket != rec.bucket {
            mismatches.push(i + 1);
        }
    }
    writeln!(
        out,
        "{}: {}/{} labels and buckets reproduced",
        ds.header.name,
        ds.len() - mismatches.len(),
        ds.len()
    )?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::Validation(format!("stored labels disagree on records {mismatches:?}")))
    }
}

fn cmd_train(
    cfg: ExperimentConfig,
    a: &TrainArgs,
    seed_flag: Option<u64>,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let ds = read_dataset(&a.train)?;
    let spec = ds.header.spec;
    let n_add = a.n_add.unwrap_or(spec.n_add);
    if n_add != spec.n_add {
        return Err(HarnessError::Validation(format!(
            "--n-add {n_add} does not match dataset n_add {}",
            spec.n_add
        )));
    }
    let init_mode = a.init.unwrap_or(spec.init_mode);
    let tc = TrainConfig {
        epochs: a.epochs.unwrap_or(cfg.train.epochs),
        batch_size: a.batch_size.unwrap_or(cfg.train.batch_size),
        hidden: a.hidden.unwrap_or(cfg.train.hidden),
        lr: a.lr.unwrap_or(cfg.train.lr),
        seed: seed_flag.unwrap_or(cfg.train.seed),
    };
    tc.validate()?;
    let inputs = prepare_inputs(&ds, n_add, init_mode);
    let outcome = train(&inputs, 2 + n_add, &tc)?;
    let path = dest
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(format!("{}.ckpt", ds.header.name)));
    let ck = Checkpoint::new(outcome.model, n_add, init_mode, tc, Some(ds.header.name.clone()));
    write_checkpoint(&ck, &path)?;
    let mut hist_path = path.clone().into_os_string();
    hist_path.push(".history.jsonl");
    let mut hist = String::new();
    for e in &outcome.history {
        hist.push_str(&serde_json::to_string(e).expect("serializable"));
        hist.push('\n');
    }
    std::fs::write(&hist_path, hist)?;
    let last = outcome.history.last().expect("at least one epoch");
    writeln!(
        out,
        "wrote {} (epoch {}: loss {:.4}, train accuracy {:.4})",
        path.display(),
        last.epoch,
        last.loss,
        last.accuracy
    )?;
    Ok(())
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let ck: Checkpoint<f64> = read_checkpoint(&a.checkpoint)?;
    let ds = read_dataset(&a.test)?;
    if ds.header.spec.n_add != ck.header.n_add {
        return Err(HarnessError::Validation(format!(
            "checkpoint n_add {} does not match dataset n_add {}",
            ck.header.n_add, ds.header.spec.n_add
        )));
    }
    let inputs = prepare_inputs(&ds, ck.header.n_add, ck.header.init_mode);
    let acc = evaluate(&ck.model, &inputs)?;
    let correct = (acc * ds.len() as f64).round() as usize;
    writeln!(out, "accuracy: {acc:.4} ({correct}/{})", ds.len())?;
    Ok(())
}

fn cmd_table1(
    mut cfg: ExperimentConfig,
    a: &Table1Args,
    dest: Option<&Path>,
    out: &mut dyn Write,
    progress: Progress,
) -> Result<()> {
    if let Some(s) = &a.sizes {
        cfg.sizes = s.clone();
    }
    if let Some(p) = &a.properties {
        cfg.properties = p.clone();
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(e) = a.epochs {
        cfg.train.epochs = e;
    }
    let report = experiment::table1(&cfg, a.save_datasets.as_deref(), progress)?;
    let path = dest.map(Path::to_path_buf).unwrap_or_else(|| "table1.jsonl".into());
    report.write(&path)?;
    out.write_all(report.render_table().as_bytes())?;
    for (train_set, wins, runs) in generalization_summary(&report) {
        writeln!(out, "{train_set}: larger test automata scored >= smaller in {wins}/{runs} runs")?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn cmd_sweep(
    mut cfg: ExperimentConfig,
    a: &SweepArgs,
    dest: Option<&Path>,
    out: &mut dyn Write,
    progress: Progress,
) -> Result<()> {
    if let Some(v) = &a.values {
        cfg.sweep_n_add = v.clone();
    }
    if let Some(s) = a.size {
        cfg.sweep_size = s;
    }
    if let Some(p) = &a.properties {
        cfg.properties = p.clone();
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(e) = a.epochs {
        cfg.train.epochs = e;
    }
    let (report, rows) = experiment::sweep_nadd(&cfg, a.save_datasets.as_deref(), progress)?;
    let path = dest.map(Path::to_path_buf).unwrap_or_else(|| "sweep_nadd.jsonl".into());
    report.write(&path)?;
    let mut plot = path.clone().into_os_string();
    plot.push(".plot.tsv");
    let data = sweep_plot_data(&rows);
    std::fs::write(&plot, &data)?;
    out.write_all(data.as_bytes())?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}
