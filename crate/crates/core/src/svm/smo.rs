//! Sequential minimal optimization with second-order working-set selection.
//!
//! Solves `min 1/2 a^T Q a - e^T a` subject to `0 <= a_i <= C` and
//! `y^T a = 0`, where `Q_ij = y_i y_j K(x_i, x_j)`. The pair is chosen as the
//! maximal violator `i` together with the `j` that maximizes the second-order
//! decrease of the objective. The whole Gram matrix is held in memory.

use log::warn;

use super::{RbfKernel, SvmModel, TrainConfig};
use crate::backbone::{ClassId, LabeledDataset};
use crate::error::{Error, Result};

/// Curvature floor for non-positive-definite pairs (e.g. duplicate points).
const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrainStatus {
    Converged {
        iterations: usize,
    },
    /// The iteration cap was hit; the model holds the last iterate.
    IterationLimit {
        iterations: usize,
        kkt_gap: f64,
    },
}

impl TrainStatus {
    pub fn converged(&self) -> bool {
        matches!(self, TrainStatus::Converged { .. })
    }
}

/// Train and log a warning if the iteration cap is reached.
pub fn train(data: &LabeledDataset, cfg: &TrainConfig, kernel: RbfKernel) -> Result<SvmModel> {
    let (model, status) = train_with_status(data, cfg, kernel)?;
    if let TrainStatus::IterationLimit {
        iterations,
        kkt_gap,
    } = status
    {
        warn!(
            "SMO stopped at the iteration cap ({iterations} iterations, KKT gap {kkt_gap:e}, \
             C = {}, gamma = {})",
            cfg.c,
            kernel.gamma()
        );
    }
    Ok(model)
}

pub fn train_with_status(
    data: &LabeledDataset,
    cfg: &TrainConfig,
    kernel: RbfKernel,
) -> Result<(SvmModel, TrainStatus)> {
    cfg.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(Error::Training("training set is empty".into()));
    }
    let n_pos = data.count(ClassId::Minority);
    if n_pos == 0 || n_pos == n {
        return Err(Error::Training(
            "training set must contain both classes".into(),
        ));
    }

    let y: Vec<f64> = data.labels.iter().map(|l| l.sign()).collect();
    let gram = kernel.gram(&data.points);
    let k = gram.as_matrix();
    let c = cfg.c;

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = cfg.max_passes.saturating_mul(n).max(1000);

    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let status = loop {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i_sel = t;
            }
        }
        // j: second-order choice in I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        if i_sel != usize::MAX {
            let ki = k.row(i_sel);
            let kii = ki[i_sel];
            for t in 0..n {
                let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                if v >= gmax2 {
                    gmax2 = v;
                }
                let grad_diff = gmax + v;
                if grad_diff > 0.0 {
                    let quad = kii + k[(t, t)] - 2.0 * ki[t];
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = t;
                    }
                }
            }
        }

        let gap = gmax + gmax2;
        if gap < cfg.kkt_tol || j_sel == usize::MAX {
            break TrainStatus::Converged { iterations };
        }
        if iterations >= max_iter {
            break TrainStatus::IterationLimit {
                iterations,
                kkt_gap: gap,
            };
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = k[(i, j)];
        if y[i] != y[j] {
            let quad = k[(i, i)] + k[(j, j)] - 2.0 * kij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = k[(i, i)] + k[(j, j)] - 2.0 * kij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        let (ki, kj) = (k.row(i), k.row(j));
        for t in 0..n {
            grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
        }
    };

    let rho = compute_rho(&alpha, &grad, &y, c);
    let mut support_vectors = Vec::new();
    let mut coeffs = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(data.points[t]);
            coeffs.push(alpha[t] * y[t]);
        }
    }
    let model = SvmModel::new(support_vectors, coeffs, -rho, kernel, c, n)?;
    Ok((model, status))
}

// Offset from the free multipliers, or the midpoint of the feasible interval
// when every multiplier sits at a bound.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}
