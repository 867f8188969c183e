//! Pipeline execution and the run manifest.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::covert::{
    label_changes, localization, series_metrics, sufficiency, HISTOGRAM_BINS,
};
use crate::analysis::independence::{compare_path, detect_breakpoint, fit_independence};
use crate::analysis::sweep::{sweep, PerformanceSurface, Selection, SweepAxis, SweepConfig};
use crate::backbone::{generate, BackboneSpec, ClassId, LabeledDataset};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, Pipeline};
use crate::experiment::io::{cell, dataset_to_csv, Table};
use crate::seed::derive_seed;
use crate::select::{anneal_select, AnnealConfig, ParamPoint};
use crate::spectral::SpectralReducer;
use crate::svm::{self, load_model_file, save_model_file, ModelFile, SvmModel};

/// Manifest file name for a pipeline, e.g. `covert.manifest.json`.
pub fn manifest_name(pipeline: Pipeline) -> String {
    format!("{}.manifest.json", pipeline.name())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub cell: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub pipeline: String,
    pub version: String,
    /// SHA-256 of the canonical config JSON, which is embedded below.
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub threads: usize,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub seeds: Vec<SeedRecord>,
    pub outputs: Vec<OutputFile>,
}

/// Files produced by a pipeline, still in memory.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub seeds: Vec<SeedRecord>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
}

impl RunOutput {
    fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn seed(&mut self, cell: String, seed: u64) {
        self.seeds.push(SeedRecord { cell, seed });
    }
}

/// Process exit status for an error: 2 for configuration and input
/// problems, 3 for numerical and training failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Parse { .. } | Error::Io(_) => 2,
        Error::Numerical(_) | Error::Training(_) | Error::Degenerate(_) | Error::Contract(_) => 3,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Run a pipeline on a dedicated pool of `threads` workers and write its
/// files plus a manifest into the configured output directory.
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<RunManifest> {
    cfg.validate()?;
    let started_unix = unix_now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let out = pool.install(|| execute(cfg))?;

    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| {
        Error::Config(format!("output directory {} is not writable: {e}", dir.display()))
    })?;
    let mut outputs = Vec::new();
    for (name, bytes) in &out.files {
        write_file(dir, name, bytes)?;
        outputs.push(OutputFile {
            name: name.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
    }
    let manifest = RunManifest {
        pipeline: cfg.pipeline.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: sha256_hex(cfg.to_json().as_bytes()),
        config: cfg.clone(),
        threads,
        started_unix,
        finished_unix: unix_now(),
        seeds: out.seeds,
        outputs,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(dir, &manifest_name(cfg.pipeline), json.as_bytes())?;
    for line in &out.summary {
        println!("{line}");
    }
    Ok(manifest)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, bytes)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Execute a pipeline on the current rayon pool without touching the
/// output directory (except `report` and `reduce`, which read inputs).
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.pipeline {
        Pipeline::Generate => run_generate(cfg),
        Pipeline::SweepImbalance | Pipeline::SweepOverlap | Pipeline::SweepCombined => {
            let axis = cfg.pipeline.sweep_axis().expect("sweep pipeline");
            run_sweep(cfg, axis)
        }
        Pipeline::Independence => run_independence(cfg),
        Pipeline::Covert => run_covert(cfg),
        Pipeline::Reduce => run_reduce(cfg),
        Pipeline::Report => run_report(cfg),
    }
}

fn run_generate(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let spec = BackboneSpec::new(cfg.mu, cfg.alpha, cfg.n, cfg.seed)?;
    let data = generate(&spec)?;
    let mut out = RunOutput::default();
    out.seed("dataset".into(), cfg.seed);
    out.summary.push(format!(
        "generated {} points: {} minority, {} majority",
        data.len(),
        data.count(ClassId::Minority),
        data.count(ClassId::Majority)
    ));
    out.file("dataset.csv", dataset_to_csv(&data));
    Ok(out)
}

fn sweep_config(cfg: &ExperimentConfig, axis: SweepAxis) -> SweepConfig {
    SweepConfig {
        axis,
        ts: cfg.sweep_ts(),
        sizes: cfg.sizes.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        fixed_mu: cfg.mu,
        fixed_alpha: cfg.alpha,
        selection: cfg.selection,
    }
}

pub const SURFACE_HEADER: [&str; 8] = ["axis", "t", "mu", "alpha", "n", "trial", "f1", "complexity"];

pub fn surface_table(surface: &PerformanceSurface) -> Table {
    let mut t = Table::new(&SURFACE_HEADER);
    for c in &surface.cells {
        t.push(vec![
            c.axis.name().to_string(),
            cell(c.t),
            cell(c.mu),
            cell(c.alpha),
            c.n.to_string(),
            c.trial.to_string(),
            cell(c.f1),
            cell(c.complexity),
        ]);
    }
    t
}

fn record_cells(out: &mut RunOutput, surface: &PerformanceSurface) {
    for c in &surface.cells {
        let id = format!("{}/t={}/n={}/trial={}", c.axis.name(), cell(c.t), c.n, c.trial);
        out.seed(format!("{id}/train"), c.train_seed);
        out.seed(format!("{id}/test"), c.test_seed);
    }
}

fn run_sweep(cfg: &ExperimentConfig, axis: SweepAxis) -> Result<RunOutput> {
    let surface = sweep(&sweep_config(cfg, axis))?;
    let mut out = RunOutput::default();
    record_cells(&mut out, &surface);
    for n in surface.sizes() {
        for s in surface.path(axis, n) {
            out.summary.push(format!(
                "{} n={n} t={} mean_f1={} std={} complexity={}",
                axis.name(),
                cell(s.t),
                cell(s.mean_f1),
                cell(s.std_f1),
                cell(s.mean_complexity)
            ));
        }
    }
    out.file("surface.csv", surface_table(&surface).to_bytes());
    Ok(out)
}

/// Overlap slice at `alpha = 0.5`, imbalance slice at `mu = 0` and the
/// combined path, all on the configured grid and sizes.
pub fn independence_surface(cfg: &ExperimentConfig) -> Result<PerformanceSurface> {
    let base = |axis| SweepConfig {
        fixed_mu: 0.0,
        fixed_alpha: 0.5,
        ..sweep_config(cfg, axis)
    };
    let overlap = sweep(&base(SweepAxis::Overlap))?;
    let imbalance = sweep(&base(SweepAxis::Imbalance))?;
    let combined = sweep(&base(SweepAxis::Combined))?;
    Ok(overlap.merge(imbalance).merge(combined))
}

pub const INDEPENDENCE_HEADER: [&str; 6] =
    ["t", "mu", "alpha", "observed_mean", "observed_std", "predicted"];

fn run_independence(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let surface = independence_surface(cfg)?;
    let mut out = RunOutput::default();
    record_cells(&mut out, &surface);
    out.file("surface.csv", surface_table(&surface).to_bytes());

    let sizes = surface.sizes();
    let mut breakpoints = Table::new(&["n", "t_star"]);
    for &n in &sizes {
        let model = fit_independence(&surface, n)?;
        let rows = compare_path(&surface, &model, n)?;
        let mut t = Table::new(&INDEPENDENCE_HEADER);
        for r in &rows {
            t.push(vec![
                cell(r.t),
                cell(r.mu),
                cell(r.alpha),
                cell(r.observed_mean),
                cell(r.observed_std),
                cell(r.predicted),
            ]);
        }
        let path: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.observed_mean)).collect();
        let t_star = detect_breakpoint(&path)?;
        breakpoints.push(vec![n.to_string(), cell(t_star)]);
        out.summary.push(format!("n={n}: breakpoint t*={}", cell(t_star)));
        let name = if sizes.len() == 1 {
            "independence.csv".to_string()
        } else {
            format!("independence_n{n}.csv")
        };
        out.file(&name, t.to_bytes());
    }
    out.file("breakpoint.csv", breakpoints.to_bytes());
    Ok(out)
}

/// Select parameters on `data`, shrinking the fold count to what the class
/// sizes allow. Falls back to the start point when fewer than 2 folds fit.
pub fn select_on(data: &LabeledDataset, selection: &Selection, seed: u64) -> Result<ParamPoint> {
    match *selection {
        Selection::Fixed(p) => Ok(p),
        Selection::Anneal(a) => {
            let folds = a
                .folds
                .min(data.count(ClassId::Minority))
                .min(data.count(ClassId::Majority));
            if folds < 2 {
                return Ok(a.start);
            }
            anneal_select(data, &AnnealConfig { folds, seed, ..a })
        }
    }
}

/// Training set, test set and trained model of the covert pipeline.
pub struct CovertSetup {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub params: ParamPoint,
    pub model: SvmModel,
    pub seeds: Vec<SeedRecord>,
}

pub fn covert_setup(cfg: &ExperimentConfig) -> Result<CovertSetup> {
    let train_seed = derive_seed(cfg.seed, &["covert", "train"]);
    let test_seed = derive_seed(cfg.seed, &["covert", "test"]);
    let select_seed = derive_seed(cfg.seed, &["covert", "select"]);
    let train = generate(&BackboneSpec::new(cfg.mu, cfg.alpha, cfg.n, train_seed)?)?;
    let test = generate(&BackboneSpec::new(cfg.mu, cfg.alpha, cfg.n, test_seed)?)?;
    let params = select_on(&train, &cfg.selection, select_seed)?;
    let model = svm::train(&train, &params.train_config(), params.kernel())?;
    let seeds = [("covert/train", train_seed), ("covert/test", test_seed), ("covert/select", select_seed)]
        .iter()
        .map(|(c, s)| SeedRecord {
            cell: c.to_string(),
            seed: *s,
        })
        .collect();
    Ok(CovertSetup {
        train,
        test,
        params,
        model,
        seeds,
    })
}

fn run_covert(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let setup = covert_setup(cfg)?;
    let reducer = SpectralReducer::new(&setup.model)?;
    let series = reducer.series()?;
    let test = &setup.test;
    let matrix = label_changes(&series, test)?;
    let report = sufficiency(&series, test, cfg.delta)?;
    let metrics = series_metrics(&series, test, &matrix)?;
    let loc = localization(&matrix, &report, test, cfg.mu)?;

    let mut out = RunOutput {
        seeds: setup.seeds.clone(),
        ..RunOutput::default()
    };
    out.file(
        "model.json",
        save_model_file(&ModelFile {
            model: setup.model.clone(),
            reduction: None,
        }),
    );

    let mut t = Table::new(&["rank", "f1", "cosine", "n_changes"]);
    for m in &metrics {
        t.push(vec![m.rank.to_string(), cell(m.f1), cell(m.cosine), m.n_changes.to_string()]);
    }
    out.file("series.csv", t.to_bytes());

    let mut t = Table::new(&["point_id", "rank", "changed"]);
    for &i in &matrix.row_order {
        for (k, &r) in matrix.ranks.iter().enumerate() {
            t.push(vec![
                i.to_string(),
                r.to_string(),
                u8::from(matrix.changed[i][k]).to_string(),
            ]);
        }
    }
    out.file("changes.csv", t.to_bytes());

    let mut t = Table::new(&["p", "delta", "sufficiency_point", "essential_rank", "overlap_score"]);
    t.push(vec![
        cell(report.p),
        cell(report.delta),
        report.sufficiency_point.to_string(),
        report.essential_rank.to_string(),
        cell(report.overlap_score),
    ]);
    out.file("sufficiency.csv", t.to_bytes());

    let mut t = Table::new(&["rank", "proportion"]);
    for (r, p) in &loc.proportion_curve {
        t.push(vec![r.to_string(), p.map_or_else(String::new, cell)]);
    }
    out.file("localization.csv", t.to_bytes());

    let mut t = Table::new(&["bin_lo", "bin_hi", "count"]);
    for (b, count) in loc.histogram.iter().enumerate() {
        let w = 1.0 / HISTOGRAM_BINS as f64;
        t.push(vec![cell(b as f64 * w), cell((b + 1) as f64 * w), count.to_string()]);
    }
    out.file("histogram.csv", t.to_bytes());

    out.summary.push(format!(
        "params log2C={} log2gamma={}; {} support vectors, essential rank {}",
        cell(setup.params.log2_c),
        cell(setup.params.log2_gamma),
        setup.model.n_support(),
        report.essential_rank
    ));
    out.summary.push(format!(
        "base f1 {}; sufficiency point {}{}; overlap score {}",
        cell(report.p),
        report.sufficiency_point,
        if report.qualified { "" } else { " (no rank qualified)" },
        cell(report.overlap_score)
    ));
    out.summary.push(format!(
        "label changes: {} total, {} at ranks >= sufficiency point",
        matrix.total_changes(),
        matrix.changes_from(report.sufficiency_point)
    ));
    Ok(out)
}

fn run_reduce(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let path = cfg.model.as_ref().expect("validated");
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Config(format!("cannot read model {}: {e}", path.display())))?;
    let base = load_model_file(&bytes)?.model;
    let reducer = SpectralReducer::new(&base)?;
    let reduced = match cfg.rank {
        Some(r) => reducer.reduce(r)?,
        None => reducer.essential_set()?,
    };
    let mut out = RunOutput::default();
    out.summary.push(format!(
        "kept {} of {} support vectors (essential rank {})",
        reduced.rank(),
        base.n_support(),
        reducer.essential_rank()
    ));
    out.file("reduced.json", save_model_file(&reduced.to_model_file()));
    Ok(out)
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "axis", "t", "mu", "alpha", "n", "trials", "mean_f1", "std_f1", "mean_complexity",
];

/// Rebuild the per-location aggregates from a `surface.csv` table.
pub fn summarize_surface_table(table: &Table) -> Result<Table> {
    if table.header != SURFACE_HEADER {
        return Err(Error::Parse {
            what: "csv row",
            offset: 1,
            message: format!("unexpected surface header {}", table.header.join(",")),
        });
    }
    type Key = (String, String, String, String, usize);
    let mut groups: Vec<(Key, Vec<(f64, f64)>)> = Vec::new();
    for (i, r) in table.rows.iter().enumerate() {
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                what: "csv row",
                offset: i + 2,
                message: format!("`{s}` is not a number"),
            })
        };
        let n: usize = r[4].parse().map_err(|_| Error::Parse {
            what: "csv row",
            offset: i + 2,
            message: format!("`{}` is not a size", r[4]),
        })?;
        let key = (r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone(), n);
        let value = (num(&r[6])?, num(&r[7])?);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(value),
            None => groups.push((key, vec![value])),
        }
    }
    let mut out = Table::new(&SUMMARY_HEADER);
    for ((axis, t, mu, alpha, n), vals) in groups {
        let k = vals.len() as f64;
        let mean = vals.iter().map(|v| v.0).sum::<f64>() / k;
        let std = if vals.len() > 1 {
            (vals.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let cx = vals.iter().map(|v| v.1).sum::<f64>() / k;
        out.push(vec![
            axis,
            t,
            mu,
            alpha,
            n.to_string(),
            vals.len().to_string(),
            cell(mean),
            cell(std),
            cell(cx),
        ]);
    }
    Ok(out)
}

fn run_report(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let dir = &cfg.output_dir;
    let mut out = RunOutput::default();
    let surface = dir.join("surface.csv");
    if surface.exists() {
        let summary = summarize_surface_table(&Table::parse(&std::fs::read(&surface)?)?)?;
        for r in &summary.rows {
            out.summary.push(r.join(","));
        }
        out.file("summary.csv", summary.to_bytes());
    }
    for name in ["sufficiency.csv", "independence.csv", "breakpoint.csv"] {
        let path = dir.join(name);
        if path.exists() {
            let t = Table::parse(&std::fs::read(&path)?)?;
            out.summary.push(format!("{name}: {}", t.header.join(",")));
            for r in &t.rows {
                out.summary.push(format!("  {}", r.join(",")));
            }
        }
    }
    if out.summary.is_empty() {
        return Err(Error::Config(format!(
            "nothing to report in {}: no surface.csv, sufficiency.csv or independence.csv",
            dir.display()
        )));
    }
    Ok(out)
}
