//! Signals of overfitting that hides inside ambiguous regions: label changes
//! across a reduction series, the sufficiency point, and where the changing
//! test points lie.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::metrics::{evaluate, EvalResult};
use crate::backbone::{ambiguous_mass, ambiguous_region, ClassId, LabeledDataset};
use crate::error::{Error, Result};
use crate::spectral::{hyperplane_cosine, ReductionSeries};

pub const DEFAULT_DELTA: f64 = 0.001;
pub const HISTOGRAM_BINS: usize = 50;

/// `out[k][i]`: label of test point `i` under `series.models[k]`.
pub fn series_predictions(series: &ReductionSeries, test: &LabeledDataset) -> Vec<Vec<ClassId>> {
    series
        .models
        .par_iter()
        .map(|m| m.model.predict_all(test))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelChangeMatrix {
    /// Column ranks; column `k` compares rank `ranks[k]` with the rank before.
    pub ranks: Vec<usize>,
    /// `changed[i][k]` for test point `i`.
    pub changed: Vec<Vec<bool>>,
    /// Largest rank at which each point changes label.
    pub last_change: Vec<Option<usize>>,
    /// Point ids by descending `last_change`; unchanged points last.
    pub row_order: Vec<usize>,
    pub column_counts: Vec<usize>,
}

impl LabelChangeMatrix {
    /// `ranks[k]` labels `predictions[k]`; ranks must be increasing.
    pub fn from_predictions(ranks: &[usize], predictions: &[Vec<ClassId>]) -> Result<Self> {
        if ranks.is_empty() || ranks.len() != predictions.len() {
            return Err(Error::parameter(
                "label changes need one prediction vector per rank and at least one rank",
            ));
        }
        let n = predictions[0].len();
        if predictions.iter().any(|p| p.len() != n) {
            return Err(Error::parameter("prediction vectors differ in length"));
        }
        let cols = ranks.len() - 1;
        let mut changed = vec![vec![false; cols]; n];
        let mut column_counts = vec![0; cols];
        let mut last_change = vec![None; n];
        for k in 0..cols {
            for i in 0..n {
                if predictions[k + 1][i] != predictions[k][i] {
                    changed[i][k] = true;
                    column_counts[k] += 1;
                    last_change[i] = Some(ranks[k + 1]);
                }
            }
        }
        let mut row_order: Vec<usize> = (0..n).collect();
        row_order.sort_by(|&a, &b| last_change[b].cmp(&last_change[a]).then(a.cmp(&b)));
        Ok(LabelChangeMatrix {
            ranks: ranks[1..].to_vec(),
            changed,
            last_change,
            row_order,
            column_counts,
        })
    }

    pub fn n_points(&self) -> usize {
        self.changed.len()
    }

    pub fn total_changes(&self) -> usize {
        self.column_counts.iter().sum()
    }

    /// Change events in columns with rank `>= rank`.
    pub fn changes_from(&self, rank: usize) -> usize {
        self.ranks
            .iter()
            .zip(&self.column_counts)
            .filter(|(&r, _)| r >= rank)
            .map(|(_, c)| c)
            .sum()
    }

    /// Points with at least one change in a column with rank `>= rank`.
    pub fn points_changing_from(&self, rank: usize) -> Vec<usize> {
        let first = self.ranks.partition_point(|&r| r < rank);
        (0..self.n_points())
            .filter(|&i| self.changed[i][first..].iter().any(|&c| c))
            .collect()
    }
}

pub fn label_changes(series: &ReductionSeries, test: &LabeledDataset) -> Result<LabelChangeMatrix> {
    if series.models.is_empty() {
        return Err(Error::parameter("empty reduction series"));
    }
    LabelChangeMatrix::from_predictions(&series.ranks(), &series_predictions(series, test))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub sufficiency_point: usize,
    /// F1 of the unreduced model.
    pub p: f64,
    pub delta: f64,
    pub essential_rank: usize,
    pub overlap_score: f64,
    /// False when even the essential rank misses `p - delta`; the sufficiency
    /// point is then reported as the essential rank.
    pub qualified: bool,
    /// `(rank, f1)` for the whole series.
    pub rank_f1: Vec<(usize, f64)>,
}

impl SufficiencyReport {
    /// Lowest rank from which every higher rank scores at least `p - delta`.
    pub fn from_scores(p: f64, rank_f1: Vec<(usize, f64)>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::parameter(format!("delta must be positive, got {delta}")));
        }
        let Some(&(essential_rank, _)) = rank_f1.last() else {
            return Err(Error::parameter("no ranks to scan"));
        };
        let threshold = p - delta;
        let mut point = None;
        for &(rank, f1) in rank_f1.iter().rev() {
            if f1 < threshold {
                break;
            }
            point = Some(rank);
        }
        let (sufficiency_point, qualified) = match point {
            Some(r) => (r, true),
            None => (essential_rank, false),
        };
        Ok(SufficiencyReport {
            sufficiency_point,
            p,
            delta,
            essential_rank,
            overlap_score: sufficiency_point as f64 / essential_rank as f64,
            qualified,
            rank_f1,
        })
    }
}

pub fn sufficiency(series: &ReductionSeries, test: &LabeledDataset, delta: f64) -> Result<SufficiencyReport> {
    if series.models.is_empty() {
        return Err(Error::parameter("empty reduction series"));
    }
    let p = evaluate(&series.base, test).f1;
    let rank_f1 = series
        .models
        .par_iter()
        .map(|m| (m.rank(), evaluate(&m.model, test).f1))
        .collect();
    SufficiencyReport::from_scores(p, rank_f1, delta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Localization {
    /// Counts of `x1` over uniform bins on `[0, 1]` for points that change
    /// label after the sufficiency point.
    pub histogram: Vec<usize>,
    /// `(rank, fraction)`: among points changing at ranks `>= rank`, the
    /// fraction inside the ambiguous region. `None` when no point changes.
    pub proportion_curve: Vec<(usize, Option<f64>)>,
    /// Probability mass of the ambiguous region under the test distribution.
    pub ambiguous_mass: f64,
}

pub fn localization(
    matrix: &LabelChangeMatrix,
    report: &SufficiencyReport,
    test: &LabeledDataset,
    mu: f64,
) -> Result<Localization> {
    if matrix.n_points() != test.len() {
        return Err(Error::parameter(format!(
            "label-change matrix has {} rows for {} test points",
            matrix.n_points(),
            test.len()
        )));
    }
    let region = ambiguous_region(mu)?;
    let mut histogram = vec![0; HISTOGRAM_BINS];
    for i in matrix.points_changing_from(report.sufficiency_point + 1) {
        let x1 = test.points[i][0];
        let bin = ((x1 * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin] += 1;
    }
    let proportion_curve = matrix
        .ranks
        .iter()
        .map(|&r| {
            let pts = matrix.points_changing_from(r);
            let frac = (!pts.is_empty()).then(|| {
                let inside = pts.iter().filter(|&&i| region.contains(test.points[i][0])).count();
                inside as f64 / pts.len() as f64
            });
            (r, frac)
        })
        .collect();
    Ok(Localization {
        histogram,
        proportion_curve,
        ambiguous_mass: ambiguous_mass(mu)?,
    })
}

/// One row of the per-rank series summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub rank: usize,
    pub f1: f64,
    /// Cosine between this rank's hyperplane and the unreduced one.
    pub cosine: f64,
    /// Label changes relative to the previous rank.
    pub n_changes: usize,
}

pub fn series_metrics(
    series: &ReductionSeries,
    test: &LabeledDataset,
    matrix: &LabelChangeMatrix,
) -> Result<Vec<SeriesPoint>> {
    series
        .models
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let EvalResult { f1, .. } = evaluate(&m.model, test);
            Ok(SeriesPoint {
                rank: m.rank(),
                f1,
                cosine: hyperplane_cosine(&m.model, series.base.as_ref())?,
                n_changes: if k == 0 { 0 } else { matrix.column_counts[k - 1] },
            })
        })
        .collect()
}
