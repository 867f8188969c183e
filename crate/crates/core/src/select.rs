//! `(C, gamma)` selection by simulated annealing over stratified k-fold
//! cross-validated F1.
//!
//! The search runs in `log2` coordinates inside the box
//! `[-5, 15] x [-15, 3]`. Proposals are Gaussian steps clamped to the box,
//! accepted by the Metropolis rule under a geometric cooling schedule. The
//! chain starts from the best of the start point and a coarse probe grid, so
//! a start on a flat zero-F1 plateau does not leave it wandering. The best
//! point ever evaluated is returned, not the final state of the chain.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::metrics::EvalResult;
use crate::backbone::{ClassId, LabeledDataset};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};
use crate::svm::{self, RbfKernel, TrainConfig};

pub const LOG2_C_MIN: f64 = -5.0;
pub const LOG2_C_MAX: f64 = 15.0;
pub const LOG2_GAMMA_MIN: f64 = -15.0;
pub const LOG2_GAMMA_MAX: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub log2_c: f64,
    pub log2_gamma: f64,
}

impl Default for ParamPoint {
    /// `C = 1`, `gamma = 1/2` (one over the input dimension).
    fn default() -> Self {
        ParamPoint {
            log2_c: 0.0,
            log2_gamma: -1.0,
        }
    }
}

impl ParamPoint {
    pub fn new(log2_c: f64, log2_gamma: f64) -> Result<Self> {
        let p = ParamPoint { log2_c, log2_gamma };
        if p.clamped() != p || !log2_c.is_finite() || !log2_gamma.is_finite() {
            return Err(Error::parameter(format!(
                "parameter point ({log2_c}, {log2_gamma}) outside \
                 [{LOG2_C_MIN}, {LOG2_C_MAX}] x [{LOG2_GAMMA_MIN}, {LOG2_GAMMA_MAX}]"
            )));
        }
        Ok(p)
    }

    pub fn clamped(self) -> Self {
        ParamPoint {
            log2_c: self.log2_c.clamp(LOG2_C_MIN, LOG2_C_MAX),
            log2_gamma: self.log2_gamma.clamp(LOG2_GAMMA_MIN, LOG2_GAMMA_MAX),
        }
    }

    pub fn c(&self) -> f64 {
        self.log2_c.exp2()
    }

    pub fn gamma(&self) -> f64 {
        self.log2_gamma.exp2()
    }

    pub fn kernel(&self) -> RbfKernel {
        RbfKernel::new(self.gamma()).expect("gamma from the box is positive")
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig::with_c(self.c())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    /// Accepts an F1 loss of 0.05 with probability about 0.8 at the start.
    pub initial_temp: f64,
    pub cooling_rate: f64,
    pub steps: usize,
    /// Proposal standard deviation, in `log2` units.
    pub step_scale: f64,
    pub folds: usize,
    pub seed: u64,
    pub start: ParamPoint,
    /// Probe grid points per axis, at the cell centres of the box. 0 disables.
    pub probe_grid: usize,
    /// SMO pass cap for the fits inside cross-validation. Lower than the
    /// training default so that very large `C` costs a bounded amount.
    pub cv_max_passes: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            initial_temp: 0.2,
            cooling_rate: 0.95,
            steps: 200,
            step_scale: 1.0,
            folds: 5,
            seed: 0,
            start: ParamPoint::default(),
            probe_grid: 3,
            cv_max_passes: 100,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("anneal steps must be at least 1".into()));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::Config(format!(
                "cooling rate must lie in (0, 1), got {}",
                self.cooling_rate
            )));
        }
        if !(self.initial_temp > 0.0) || !(self.step_scale > 0.0) {
            return Err(Error::Config(
                "initial temperature and step scale must be positive".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!(
                "need at least 2 folds, got {}",
                self.folds
            )));
        }
        if self.cv_max_passes == 0 {
            return Err(Error::Config("cv_max_passes must be at least 1".into()));
        }
        ParamPoint::new(self.start.log2_c, self.start.log2_gamma)?;
        Ok(())
    }
}

/// Fold index for every row. Each class is shuffled and dealt round-robin,
/// so class proportions are as even as possible across folds.
pub fn stratified_folds(data: &LabeledDataset, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    for class in [ClassId::Minority, ClassId::Majority] {
        let count = data.count(class);
        if count < folds {
            return Err(Error::Config(format!(
                "{class:?} class has {count} members, too few to stratify into {folds} folds"
            )));
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut assignment = vec![0; data.len()];
    for class in [ClassId::Minority, ClassId::Majority] {
        let mut members: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == class).collect();
        // Fisher-Yates with u64 draws keeps the stream platform independent.
        for i in (1..members.len()).rev() {
            let j = rng.random_range(0..=i as u64) as usize;
            members.swap(i, j);
        }
        for (pos, &idx) in members.iter().enumerate() {
            assignment[idx] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Mean F1 (minority positive) over stratified folds.
pub fn cross_val_f1(data: &LabeledDataset, p: &ParamPoint, folds: usize, seed: u64) -> Result<f64> {
    cv_score(data, &p.train_config(), p.kernel(), folds, seed)
}

fn cv_score(
    data: &LabeledDataset,
    cfg: &TrainConfig,
    kernel: RbfKernel,
    folds: usize,
    seed: u64,
) -> Result<f64> {
    let assignment = stratified_folds(data, folds, seed)?;
    let scores: Vec<Result<f64>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != fold).collect();
            let test_idx: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == fold).collect();
            // a capped fit still scores; the cap only bounds the search cost
            let (model, _) = svm::train_with_status(&data.subset(&train_idx), cfg, kernel)?;
            let test = data.subset(&test_idx);
            Ok(EvalResult::from_predictions(&test.labels, &model.predict_all(&test), 0.0).f1)
        })
        .collect();
    let mut total = 0.0;
    for s in scores {
        total += s?;
    }
    Ok(total / folds as f64)
}

/// Cell centres of a `k x k` grid over the box, `C` varying slowest.
pub fn probe_points(k: usize) -> Vec<ParamPoint> {
    let centre = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / k as f64;
    (0..k)
        .flat_map(|i| {
            (0..k).map(move |j| ParamPoint {
                log2_c: centre(LOG2_C_MIN, LOG2_C_MAX, i),
                log2_gamma: centre(LOG2_GAMMA_MIN, LOG2_GAMMA_MAX, j),
            })
        })
        .collect()
}

/// Metropolis acceptance for a maximization problem.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta >= 0.0 || (temperature > 0.0 && u < (delta / temperature).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub point: ParamPoint,
    pub value: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct AnnealTrace {
    /// Every objective evaluation in order: the start point, the probe grid,
    /// then the chain.
    pub evaluations: Vec<Evaluation>,
    pub best: ParamPoint,
    pub best_value: f64,
}

/// Generic annealer over the parameter box.
pub fn anneal<F>(cfg: &AnnealConfig, mut objective: F) -> Result<AnnealTrace>
where
    F: FnMut(&ParamPoint) -> Result<f64>,
{
    cfg.validate()?;
    let mut rng = rng_from_seed(derive_seed(cfg.seed, &["anneal", "chain"]));
    let step = Normal::new(0.0, cfg.step_scale)
        .map_err(|e| Error::Config(format!("invalid step scale: {e}")))?;

    let mut current = cfg.start;
    let mut current_value = objective(&current)?;
    let mut evaluations = vec![Evaluation {
        point: current,
        value: current_value,
        accepted: true,
    }];
    for point in probe_points(cfg.probe_grid) {
        let value = objective(&point)?;
        let accepted = value > current_value;
        if accepted {
            current = point;
            current_value = value;
        }
        evaluations.push(Evaluation { point, value, accepted });
    }
    let mut best = current;
    let mut best_value = current_value;

    let mut temperature = cfg.initial_temp;
    for _ in 0..cfg.steps {
        let proposal = ParamPoint {
            log2_c: current.log2_c + step.sample(&mut rng),
            log2_gamma: current.log2_gamma + step.sample(&mut rng),
        }
        .clamped();
        let value = objective(&proposal)?;
        let u: f64 = rng.random();
        let accepted = metropolis_accept(value - current_value, temperature, u);
        if accepted {
            current = proposal;
            current_value = value;
        }
        if value > best_value {
            best = proposal;
            best_value = value;
        }
        evaluations.push(Evaluation {
            point: proposal,
            value,
            accepted,
        });
        temperature *= cfg.cooling_rate;
    }
    Ok(AnnealTrace {
        evaluations,
        best,
        best_value,
    })
}

/// Anneal over cross-validated F1 on `data`. Fold assignment is fixed for
/// the whole run, so the objective is a deterministic function of the point.
pub fn anneal_select(data: &LabeledDataset, cfg: &AnnealConfig) -> Result<ParamPoint> {
    Ok(anneal_select_traced(data, cfg)?.best)
}

pub fn anneal_select_traced(data: &LabeledDataset, cfg: &AnnealConfig) -> Result<AnnealTrace> {
    cfg.validate()?;
    // fail fast on unstratifiable data
    stratified_folds(data, cfg.folds, 0)?;
    let fold_seed = derive_seed(cfg.seed, &["anneal", "folds"]);
    anneal(cfg, |p| {
        let train = TrainConfig {
            max_passes: cfg.cv_max_passes,
            ..p.train_config()
        };
        cv_score(data, &train, p.kernel(), cfg.folds, fold_seed)
    })
}
