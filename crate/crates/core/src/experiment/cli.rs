//! Command-line front end. Flags override values from `--config`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::sweep::{Selection, SweepAxis};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, Pipeline};
use crate::experiment::run::{exit_code, run};
use crate::select::ParamPoint;

pub const THREADS_ENV: &str = "SVMSPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "svmspectra", version, about = "Overlap/imbalance SVM experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one dataset.
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Performance surface along one axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "combined")]
        axis: AxisArg,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Additivity test of overlap and imbalance, with breakpoint detection.
    Independence {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Rank-reduction series, label changes and sufficiency point.
    Covert {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Reduce a saved model to a given rank (default: its essential set).
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Summarize CSV output already present in `--out`.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Training sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[command(flatten)]
    pub select: SelectArgs,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Skip annealing and use `log2C,log2gamma`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LOG2C,LOG2GAMMA")]
    pub params: Option<Vec<f64>>,
    #[arg(long)]
    pub anneal_steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    Imbalance,
    Overlap,
    Combined,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Imbalance => SweepAxis::Imbalance,
            AxisArg::Overlap => SweepAxis::Overlap,
            AxisArg::Combined => SweepAxis::Combined,
        }
    }
}

fn base_config(common: &Common, pipeline: Pipeline) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.pipeline = pipeline;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn apply_data(cfg: &mut ExperimentConfig, d: &DataArgs) {
    if let Some(v) = d.mu {
        cfg.mu = v;
    }
    if let Some(v) = d.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = d.n {
        cfg.n = v;
    }
}

fn apply_select(cfg: &mut ExperimentConfig, s: &SelectArgs) -> Result<()> {
    if let Some(p) = &s.params {
        if p.len() != 2 {
            return Err(Error::Config(format!("--params takes 2 values, got {}", p.len())));
        }
        cfg.selection = Selection::Fixed(ParamPoint::new(p[0], p[1]).map_err(|e| Error::Config(e.to_string()))?);
    }
    if let Some(steps) = s.anneal_steps {
        match &mut cfg.selection {
            Selection::Anneal(a) => a.steps = steps,
            Selection::Fixed(_) => {
                return Err(Error::Config("--anneal-steps conflicts with fixed parameters".into()))
            }
        }
    }
    Ok(())
}

fn apply_grid(cfg: &mut ExperimentConfig, g: &GridArgs) -> Result<()> {
    if let Some(v) = &g.sizes {
        cfg.sizes = v.clone();
    }
    if let Some(v) = g.trials {
        cfg.trials = v;
    }
    if let Some(v) = g.grid_points {
        cfg.grid_points = v;
        cfg.ts = None;
    }
    apply_select(cfg, &g.select)
}

/// Turn parsed arguments into a config.
pub fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let cfg = match &cli.command {
        Command::Generate { common, data } => {
            let mut c = base_config(common, Pipeline::Generate)?;
            apply_data(&mut c, data);
            c
        }
        Command::Sweep { common, axis, data, grid } => {
            let pipeline = match SweepAxis::from(*axis) {
                SweepAxis::Imbalance => Pipeline::SweepImbalance,
                SweepAxis::Overlap => Pipeline::SweepOverlap,
                SweepAxis::Combined => Pipeline::SweepCombined,
            };
            let mut c = base_config(common, pipeline)?;
            apply_data(&mut c, data);
            apply_grid(&mut c, grid)?;
            c
        }
        Command::Independence { common, grid } => {
            let mut c = base_config(common, Pipeline::Independence)?;
            apply_grid(&mut c, grid)?;
            c
        }
        Command::Covert { common, data, select, delta } => {
            let mut c = base_config(common, Pipeline::Covert)?;
            apply_data(&mut c, data);
            apply_select(&mut c, select)?;
            if let Some(d) = delta {
                c.delta = *d;
            }
            c
        }
        Command::Reduce { common, model, rank } => {
            let mut c = base_config(common, Pipeline::Reduce)?;
            if model.is_some() {
                c.model = model.clone();
            }
            if rank.is_some() {
                c.rank = *rank;
            }
            c
        }
        Command::Report { common } => base_config(common, Pipeline::Report)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Generate { common, .. }
            | Command::Sweep { common, .. }
            | Command::Independence { common, .. }
            | Command::Covert { common, .. }
            | Command::Reduce { common, .. }
            | Command::Report { common } => common,
        }
    }
}

/// `--threads`, then the environment variable, then the config file, then
/// the number of available cores. Not part of the config, so thread count
/// never changes the config hash.
pub fn resolve_threads(cli: &Cli, cfg: &ExperimentConfig) -> usize {
    cli.command
        .common()
        .threads
        .or(cfg.threads)
        .unwrap_or_else(default_threads)
        .max(1)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parse, run and return the process exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = build_config(&cli).and_then(|cfg| {
        let threads = resolve_threads(&cli, &cfg);
        run(&cfg, threads)
    });
    match outcome {
        Ok(m) => {
            let files = m.outputs.len() + 1;
            eprintln!(
                "wrote {files} file{} to {}",
                if files == 1 { "" } else { "s" },
                m.config.output_dir.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
