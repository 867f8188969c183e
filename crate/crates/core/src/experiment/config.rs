use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::covert::DEFAULT_DELTA;
use crate::analysis::sweep::{Selection, SweepAxis};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Generate,
    SweepImbalance,
    SweepOverlap,
    SweepCombined,
    Independence,
    Covert,
    Reduce,
    Report,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Generate => "generate",
            Pipeline::SweepImbalance => "sweep-imbalance",
            Pipeline::SweepOverlap => "sweep-overlap",
            Pipeline::SweepCombined => "sweep-combined",
            Pipeline::Independence => "independence",
            Pipeline::Covert => "covert",
            Pipeline::Reduce => "reduce",
            Pipeline::Report => "report",
        }
    }

    pub fn sweep_axis(self) -> Option<SweepAxis> {
        match self {
            Pipeline::SweepImbalance => Some(SweepAxis::Imbalance),
            Pipeline::SweepOverlap => Some(SweepAxis::Overlap),
            Pipeline::SweepCombined => Some(SweepAxis::Combined),
            _ => None,
        }
    }
}

/// Everything a run needs. Read from JSON; unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub seed: u64,
    /// Training (and test) sizes for sweeps.
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Points on the sweep coordinate `t in [0, 1]`.
    pub grid_points: usize,
    /// Explicit sweep coordinates; overrides `grid_points` when set.
    pub ts: Option<Vec<f64>>,
    pub mu: f64,
    pub alpha: f64,
    /// Dataset size for `generate` and `covert`.
    pub n: usize,
    pub delta: f64,
    pub selection: Selection,
    /// Input model for `reduce`.
    pub model: Option<PathBuf>,
    /// Target rank for `reduce`; the essential set when absent.
    pub rank: Option<usize>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pipeline: Pipeline::Generate,
            seed: 0,
            sizes: vec![800],
            trials: 10,
            grid_points: 11,
            ts: None,
            mu: 0.0,
            alpha: 0.5,
            n: 800,
            delta: DEFAULT_DELTA,
            selection: Selection::default(),
            model: None,
            rank: None,
            output_dir: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Parse JSON text. Errors carry the line and column of the problem.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical JSON; the manifest hashes these bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn sweep_ts(&self) -> Vec<f64> {
        self.ts
            .clone()
            .unwrap_or_else(|| crate::analysis::sweep::unit_grid(self.grid_points))
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, msg: String| Err(Error::Config(format!("field `{name}`: {msg}")));
        if !(0.0..=1.0).contains(&self.mu) {
            return field("mu", format!("{} outside [0, 1]", self.mu));
        }
        if !(crate::backbone::MIN_ALPHA..=crate::backbone::MAX_ALPHA).contains(&self.alpha) {
            return field("alpha", format!("{} outside [0.5, 0.95]", self.alpha));
        }
        if self.n < 2 {
            return field("n", format!("{} is below 2", self.n));
        }
        if !(self.delta > 0.0) {
            return field("delta", format!("{} is not positive", self.delta));
        }
        if self.trials == 0 {
            return field("trials", "must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return field("sizes", "need at least one size, each at least 2".into());
        }
        if self.ts.is_none() && self.grid_points < 2 {
            return field("grid_points", format!("{} is below 2", self.grid_points));
        }
        if self.threads == Some(0) {
            return field("threads", "must be at least 1".into());
        }
        if let Selection::Anneal(a) = &self.selection {
            a.validate()
                .map_err(|e| Error::Config(format!("field `selection`: {e}")))?;
        }
        if self.pipeline == Pipeline::Reduce && self.model.is_none() {
            return field("model", "required by the reduce pipeline".into());
        }
        if self.rank == Some(0) {
            return field("rank", "must be at least 1".into());
        }
        Ok(())
    }
}
