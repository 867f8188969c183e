//! Performance surfaces over the overlap and imbalance parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::metrics::evaluate;
use crate::backbone::{check_alpha, check_mu, generate, BackboneSpec, ClassId, MAX_ALPHA};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::select::{anneal_select, AnnealConfig, ParamPoint};
use crate::svm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// `alpha = 0.5 + 0.45 t` at a fixed `mu`.
    Imbalance,
    /// `mu = t` at a fixed `alpha`.
    Overlap,
    /// Both at once: `mu = t`, `alpha = 0.5 + 0.45 t`.
    Combined,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Imbalance => "imbalance",
            SweepAxis::Overlap => "overlap",
            SweepAxis::Combined => "combined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "imbalance" => Some(SweepAxis::Imbalance),
            "overlap" => Some(SweepAxis::Overlap),
            "combined" => Some(SweepAxis::Combined),
            _ => None,
        }
    }

    /// `(mu, alpha)` at path coordinate `t`.
    pub fn params(self, t: f64, fixed_mu: f64, fixed_alpha: f64) -> (f64, f64) {
        match self {
            SweepAxis::Imbalance => (fixed_mu, alpha_at(t)),
            SweepAxis::Overlap => (t, fixed_alpha),
            SweepAxis::Combined => (t, alpha_at(t)),
        }
    }
}

/// `0.5 + 0.45 t`, kept inside the legal range against rounding at `t = 1`.
pub fn alpha_at(t: f64) -> f64 {
    (0.5 + 0.45 * t).min(MAX_ALPHA)
}

/// Inverse of [`alpha_at`].
pub fn t_for_alpha(alpha: f64) -> f64 {
    (alpha - 0.5) / 0.45
}

/// `count` evenly spaced points on `[0, 1]`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|k| k as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Selection {
    /// Anneal once per `(t, n)` on a dedicated selection set; the seed field
    /// of the config is replaced by a per-cell derived seed.
    Anneal(AnnealConfig),
    Fixed(ParamPoint),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::Anneal(AnnealConfig::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub ts: Vec<f64>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Used by the imbalance axis.
    pub fixed_mu: f64,
    /// Used by the overlap axis.
    pub fixed_alpha: f64,
    pub selection: Selection,
}

impl SweepConfig {
    pub fn new(axis: SweepAxis, seed: u64) -> Self {
        SweepConfig {
            axis,
            ts: unit_grid(11),
            sizes: vec![800],
            trials: 10,
            seed,
            fixed_mu: 0.0,
            fixed_alpha: 0.5,
            selection: Selection::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ts.is_empty() || self.sizes.is_empty() || self.trials == 0 {
            return Err(Error::Config(
                "sweep needs at least one t value, one size and one trial".into(),
            ));
        }
        for &t in &self.ts {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("sweep coordinate t={t} outside [0, 1]")));
            }
            let (mu, alpha) = self.axis.params(t, self.fixed_mu, self.fixed_alpha);
            check_mu(mu).and_then(|_| check_alpha(alpha)).map_err(as_config)?;
            for &n in &self.sizes {
                let spec = BackboneSpec { mu, alpha, n, seed: 0 };
                spec.validate().map_err(as_config)?;
                if spec.minority_count() == 0 {
                    return Err(Error::Config(format!(
                        "n={n} at alpha={alpha} leaves no minority examples"
                    )));
                }
            }
        }
        if let Selection::Anneal(a) = &self.selection {
            a.validate()?;
        }
        Ok(())
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Parameter(m) => Error::Config(m),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceCell {
    pub axis: SweepAxis,
    pub t_index: usize,
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub n: usize,
    pub trial: usize,
    pub train_seed: u64,
    pub test_seed: u64,
    pub params: ParamPoint,
    pub f1: f64,
    pub complexity: f64,
}

/// Trial aggregate of one `(axis, t, n)` location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSummary {
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub n: usize,
    pub trials: usize,
    pub mean_f1: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_f1: f64,
    pub mean_complexity: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PerformanceSurface {
    /// Sorted by `(axis, t_index, n, trial)`.
    pub cells: Vec<SurfaceCell>,
}

impl PerformanceSurface {
    pub fn merge(mut self, other: PerformanceSurface) -> Self {
        self.cells.extend(other.cells);
        self.cells
            .sort_by(|a, b| (a.axis, a.t_index, a.n, a.trial).cmp(&(b.axis, b.t_index, b.n, b.trial)));
        self
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Surface whose f1 values come from a formula instead of training.
    pub fn synthetic(
        axis: SweepAxis,
        ts: &[f64],
        n: usize,
        trials: usize,
        fixed_mu: f64,
        fixed_alpha: f64,
        mut f1: impl FnMut(f64, f64, usize) -> f64,
    ) -> Self {
        let mut cells = Vec::new();
        for (t_index, &t) in ts.iter().enumerate() {
            let (mu, alpha) = axis.params(t, fixed_mu, fixed_alpha);
            for trial in 0..trials {
                cells.push(SurfaceCell {
                    axis,
                    t_index,
                    t,
                    mu,
                    alpha,
                    n,
                    trial,
                    train_seed: 0,
                    test_seed: 0,
                    params: ParamPoint::default(),
                    f1: f1(mu, alpha, trial),
                    complexity: 0.0,
                });
            }
        }
        PerformanceSurface { cells }
    }

    /// Per-`t` aggregates of the cells matching `filter`, ordered by `t`.
    pub fn summarize(&self, filter: impl Fn(&SurfaceCell) -> bool) -> Vec<CellSummary> {
        let mut picked: Vec<&SurfaceCell> = self.cells.iter().filter(|c| filter(c)).collect();
        picked.sort_by(|a, b| a.n.cmp(&b.n).then(a.t.total_cmp(&b.t)).then(a.trial.cmp(&b.trial)));
        let mut out: Vec<CellSummary> = Vec::new();
        for group in picked.chunk_by(|a, b| a.t == b.t && a.n == b.n) {
            let k = group.len() as f64;
            let mean_f1 = group.iter().map(|c| c.f1).sum::<f64>() / k;
            let std_f1 = if group.len() > 1 {
                (group.iter().map(|c| (c.f1 - mean_f1).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            let head = group[0];
            out.push(CellSummary {
                t: head.t,
                mu: head.mu,
                alpha: head.alpha,
                n: head.n,
                trials: group.len(),
                mean_f1,
                std_f1,
                mean_complexity: group.iter().map(|c| c.complexity).sum::<f64>() / k,
            });
        }
        out
    }

    /// Aggregates along one axis at one training size.
    pub fn path(&self, axis: SweepAxis, n: usize) -> Vec<CellSummary> {
        self.summarize(|c| c.axis == axis && c.n == n)
    }
}

fn cell_seed(master: u64, axis: SweepAxis, parts: &[String]) -> u64 {
    let mut path = vec!["sweep".to_string(), axis.name().to_string()];
    path.extend_from_slice(parts);
    derive_seed(master, &path)
}

/// Parameters for one `(t, n)` location.
fn select_params(
    cfg: &SweepConfig,
    mu: f64,
    alpha: f64,
    n: usize,
    t_index: usize,
    n_index: usize,
) -> Result<ParamPoint> {
    let anneal = match cfg.selection {
        Selection::Fixed(p) => return Ok(p),
        Selection::Anneal(a) => a,
    };
    let coords = [t_index.to_string(), n_index.to_string()];
    let data_seed = cell_seed(cfg.seed, cfg.axis, &[&["select".to_string()][..], &coords].concat());
    let data = generate(&BackboneSpec::new(mu, alpha, n, data_seed)?)?;
    let folds = anneal
        .folds
        .min(data.count(ClassId::Minority))
        .min(data.count(ClassId::Majority));
    if folds < 2 {
        log::info!("too few minority examples to cross-validate at n={n}; using start point");
        return Ok(anneal.start);
    }
    let local = AnnealConfig {
        folds,
        seed: cell_seed(cfg.seed, cfg.axis, &[&["anneal".to_string()][..], &coords].concat()),
        ..anneal
    };
    anneal_select(&data, &local)
}

/// Train and evaluate one model per `(t, n, trial)`.
///
/// Hyperparameters are selected once per `(t, n)`. Every dataset seed is
/// derived from the master seed and the cell coordinates, so the result does
/// not depend on scheduling. Runs on the current rayon pool.
pub fn sweep(cfg: &SweepConfig) -> Result<PerformanceSurface> {
    cfg.validate()?;
    let locations: Vec<(usize, usize)> = (0..cfg.ts.len())
        .flat_map(|ti| (0..cfg.sizes.len()).map(move |ni| (ti, ni)))
        .collect();

    let params: Vec<ParamPoint> = locations
        .par_iter()
        .map(|&(ti, ni)| {
            let (mu, alpha) = cfg.axis.params(cfg.ts[ti], cfg.fixed_mu, cfg.fixed_alpha);
            select_params(cfg, mu, alpha, cfg.sizes[ni], ti, ni).map_err(|e| at_cell(e, cfg, ti, ni, None))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..locations.len())
        .flat_map(|li| (0..cfg.trials).map(move |trial| (li, trial)))
        .collect();

    let mut cells = jobs
        .par_iter()
        .map(|&(li, trial)| {
            let (ti, ni) = locations[li];
            run_cell(cfg, ti, ni, trial, params[li]).map_err(|e| at_cell(e, cfg, ti, ni, Some(trial)))
        })
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by(|a, b| (a.t_index, a.n, a.trial).cmp(&(b.t_index, b.n, b.trial)));
    Ok(PerformanceSurface { cells })
}

fn run_cell(cfg: &SweepConfig, ti: usize, ni: usize, trial: usize, p: ParamPoint) -> Result<SurfaceCell> {
    let t = cfg.ts[ti];
    let n = cfg.sizes[ni];
    let (mu, alpha) = cfg.axis.params(t, cfg.fixed_mu, cfg.fixed_alpha);
    let coords = [ti.to_string(), ni.to_string(), trial.to_string()];
    let train_seed = cell_seed(cfg.seed, cfg.axis, &[&coords[..], &["train".to_string()]].concat());
    let test_seed = cell_seed(cfg.seed, cfg.axis, &[&coords[..], &["test".to_string()]].concat());
    let train = generate(&BackboneSpec::new(mu, alpha, n, train_seed)?)?;
    let test = generate(&BackboneSpec::new(mu, alpha, n, test_seed)?)?;
    let model = svm::train(&train, &p.train_config(), p.kernel())?;
    let eval = evaluate(&model, &test);
    Ok(SurfaceCell {
        axis: cfg.axis,
        t_index: ti,
        t,
        mu,
        alpha,
        n,
        trial,
        train_seed,
        test_seed,
        params: p,
        f1: eval.f1,
        complexity: eval.complexity,
    })
}

fn at_cell(e: Error, cfg: &SweepConfig, ti: usize, ni: usize, trial: Option<usize>) -> Error {
    let location = match trial {
        Some(k) => format!(
            "{} sweep cell t={} n={} trial={k}",
            cfg.axis.name(),
            cfg.ts[ti],
            cfg.sizes[ni]
        ),
        None => format!(
            "{} sweep selection t={} n={}",
            cfg.axis.name(),
            cfg.ts[ti],
            cfg.sizes[ni]
        ),
    };
    match e {
        Error::Numerical(m) => Error::Numerical(format!("{location}: {m}")),
        Error::Training(m) => Error::Training(format!("{location}: {m}")),
        other => other,
    }
}
