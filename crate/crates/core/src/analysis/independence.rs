//! Additive-independence test for the performance surface.
//!
//! If overlap and imbalance act independently, `P(mu, alpha)` separates into
//! `F(mu) + G(alpha) + C`. `F` and `G` are recovered from single-axis slices
//! by numerical differentiation and trapezoidal re-integration; comparing
//! their sum against a combined sweep exposes interaction.

use serde::Serialize;

use crate::analysis::sweep::{CellSummary, PerformanceSurface, SweepAxis};
use crate::error::{Error, Result};

/// Grid values closer than this count as equal.
const GRID_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceModel {
    pub mu_grid: Vec<f64>,
    /// Samples of `dP/dmu` at `alpha = 0.5`.
    pub f_prime: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// Samples of `dP/dalpha` at `mu = 0`.
    pub g_prime: Vec<f64>,
    /// Observed mean F1 at the anchor `(0, 0.5)`.
    pub constant: f64,
}

/// Central differences inside, one-sided at the ends.
pub fn derivative(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    check_grid(xs, "derivative")?;
    if ys.len() != xs.len() {
        return Err(Error::parameter("derivative needs one value per grid point"));
    }
    let n = xs.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (ys[b] - ys[a]) / (xs[b] - xs[a])
        })
        .collect())
}

/// `int_{xs[0]}^{x} y` of the piecewise-linear interpolant of `(xs, ys)`.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if x < lo - GRID_EPS || x > hi + GRID_EPS {
        return Err(Error::parameter(format!(
            "{x} outside the sampled range [{lo}, {hi}]"
        )));
    }
    let x = x.clamp(lo, hi);
    let mut total = 0.0;
    for i in 1..xs.len() {
        let (x0, x1) = (xs[i - 1], xs[i]);
        if x <= x0 {
            break;
        }
        let end = x.min(x1);
        let y_end = ys[i - 1] + (ys[i] - ys[i - 1]) * (end - x0) / (x1 - x0);
        total += 0.5 * (ys[i - 1] + y_end) * (end - x0);
    }
    Ok(total)
}

fn check_grid(xs: &[f64], what: &str) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::parameter(format!("{what}: need at least 2 grid points")));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::parameter(format!("{what}: grid must be strictly increasing")));
    }
    Ok(())
}

fn slice(
    surface: &PerformanceSurface,
    axis: SweepAxis,
    n: usize,
    fixed: impl Fn(&CellSummary) -> bool,
    what: &str,
) -> Result<Vec<CellSummary>> {
    let s: Vec<CellSummary> = surface.path(axis, n).into_iter().filter(|c| fixed(c)).collect();
    if s.len() < 2 {
        return Err(Error::parameter(format!(
            "surface lacks a {what} slice at n={n} (found {} grid points)",
            s.len()
        )));
    }
    Ok(s)
}

/// Fit from the overlap slice at `alpha = 0.5` and the imbalance slice at
/// `mu = 0` for training size `n`. Both slices must start at the anchor.
pub fn fit_independence(surface: &PerformanceSurface, n: usize) -> Result<IndependenceModel> {
    let mu_slice = slice(
        surface,
        SweepAxis::Overlap,
        n,
        |c| (c.alpha - 0.5).abs() < GRID_EPS,
        "mu (alpha = 0.5)",
    )?;
    let alpha_slice = slice(
        surface,
        SweepAxis::Imbalance,
        n,
        |c| c.mu.abs() < GRID_EPS,
        "alpha (mu = 0)",
    )?;
    let mu_grid: Vec<f64> = mu_slice.iter().map(|c| c.mu).collect();
    let alpha_grid: Vec<f64> = alpha_slice.iter().map(|c| c.alpha).collect();
    if mu_grid[0].abs() > GRID_EPS || (alpha_grid[0] - 0.5).abs() > GRID_EPS {
        return Err(Error::parameter(
            "slices must start at the anchor mu = 0, alpha = 0.5",
        ));
    }
    let f_prime = derivative(&mu_grid, &mu_slice.iter().map(|c| c.mean_f1).collect::<Vec<_>>())?;
    let g_prime = derivative(&alpha_grid, &alpha_slice.iter().map(|c| c.mean_f1).collect::<Vec<_>>())?;

    // Both slices observe the anchor; pool their trials.
    let (a, b) = (&mu_slice[0], &alpha_slice[0]);
    let constant = if a.mean_f1 == b.mean_f1 {
        a.mean_f1
    } else {
        (a.mean_f1 * a.trials as f64 + b.mean_f1 * b.trials as f64) / (a.trials + b.trials) as f64
    };
    Ok(IndependenceModel {
        mu_grid,
        f_prime,
        alpha_grid,
        g_prime,
        constant,
    })
}

/// `C + int_0^mu f' + int_0.5^alpha g'`. Errors outside the sampled grids.
pub fn predict_performance(model: &IndependenceModel, mu: f64, alpha: f64) -> Result<f64> {
    let f = cumulative_trapezoid(&model.mu_grid, &model.f_prime, mu)?;
    let g = cumulative_trapezoid(&model.alpha_grid, &model.g_prime, alpha)?;
    Ok(model.constant + f + g)
}

/// The `t` ending the largest single-step drop along a path. Ties go to the
/// smaller `t`.
pub fn detect_breakpoint(path: &[(f64, f64)]) -> Result<f64> {
    if path.len() < 3 {
        return Err(Error::parameter(format!(
            "breakpoint detection needs at least 3 path points, got {}",
            path.len()
        )));
    }
    let mut best = (f64::NEG_INFINITY, path[1].0);
    for w in path.windows(2) {
        let drop = w[0].1 - w[1].1;
        if drop > best.0 {
            best = (drop, w[1].0);
        }
    }
    Ok(best.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndependenceRow {
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub observed_mean: f64,
    pub observed_std: f64,
    pub predicted: f64,
}

/// Observed combined-path means next to the additive prediction.
pub fn compare_path(
    surface: &PerformanceSurface,
    model: &IndependenceModel,
    n: usize,
) -> Result<Vec<IndependenceRow>> {
    let path = surface.path(SweepAxis::Combined, n);
    if path.is_empty() {
        return Err(Error::parameter(format!(
            "surface has no combined path at n={n}"
        )));
    }
    path.iter()
        .map(|c| {
            Ok(IndependenceRow {
                t: c.t,
                mu: c.mu,
                alpha: c.alpha,
                observed_mean: c.mean_f1,
                observed_std: c.std_f1,
                predicted: predict_performance(model, c.mu, c.alpha)?,
            })
        })
        .collect()
}
