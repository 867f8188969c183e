//! Two-dimensional backbone datasets.
//!
//! The distinguishable axis `x1` is cut into four quarter-width regions that
//! alternate between the two classes; `x2` carries no class information.
//! Overlap widens every region by `0.25 * mu` on each side, so `mu = 0` gives
//! separable supports and `mu = 1` spreads both classes over the whole unit
//! interval. Inside a class support the density is uniform.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Width of one base region on the distinguishable axis.
const REGION_WIDTH: f64 = 0.25;

pub const MAX_ALPHA: f64 = 0.95;
pub const MIN_ALPHA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassId {
    /// Class 1, the positive class. Owns the regions that start at 0 and 0.5.
    Minority,
    /// Class 2.
    Majority,
}

impl ClassId {
    /// CSV label code: 0 for minority, 1 for majority.
    pub fn code(self) -> u8 {
        match self {
            ClassId::Minority => 0,
            ClassId::Majority => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ClassId::Minority),
            1 => Some(ClassId::Majority),
            _ => None,
        }
    }

    /// SVM target: +1 for minority, -1 for majority.
    pub fn sign(self) -> f64 {
        match self {
            ClassId::Minority => 1.0,
            ClassId::Majority => -1.0,
        }
    }

    fn base_regions(self) -> [(f64, f64); 2] {
        match self {
            ClassId::Minority => [(0.0, 0.25), (0.5, 0.75)],
            ClassId::Majority => [(0.25, 0.5), (0.75, 1.0)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackboneSpec {
    pub mu: f64,
    pub alpha: f64,
    pub n: usize,
    pub seed: u64,
}

impl BackboneSpec {
    pub fn new(mu: f64, alpha: f64, n: usize, seed: u64) -> Result<Self> {
        let spec = BackboneSpec { mu, alpha, n, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_mu(self.mu)?;
        check_alpha(self.alpha)?;
        if self.n < 2 {
            return Err(Error::parameter(format!("n must be at least 2, got {}", self.n)));
        }
        Ok(())
    }

    /// `round(alpha * n)` with halves rounded up.
    pub fn majority_count(&self) -> usize {
        (self.alpha * self.n as f64 + 0.5).floor() as usize
    }

    pub fn minority_count(&self) -> usize {
        self.n - self.majority_count()
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::parameter(format!("mu must lie in [0, 1], got {mu}")));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(MIN_ALPHA..=MAX_ALPHA).contains(&alpha) {
        return Err(Error::parameter(format!(
            "alpha must lie in [{MIN_ALPHA}, {MAX_ALPHA}], got {alpha}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted, pairwise disjoint intervals on `[0, 1]`.
///
/// Set algebra treats intervals as half-open; membership tests are closed so
/// that a sample drawn at an upper end point still counts as inside.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalize an arbitrary collection: sort, merge overlapping or touching
    /// pieces, drop empty ones.
    pub fn from_intervals(mut raw: Vec<Interval>) -> Self {
        raw.retain(|iv| iv.hi > iv.lo);
        raw.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.lo <= x && x <= iv.hi)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if hi > lo {
                    out.push(Interval { lo, hi });
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|a| {
            other
                .intervals
                .iter()
                .any(|b| b.lo <= a.lo && a.hi <= b.hi)
        })
    }

    /// Map `u` in `[0, 1)` onto the set by arc length.
    fn sample(&self, u: f64) -> f64 {
        let mut target = u * self.total_length();
        for iv in &self.intervals {
            let len = iv.length();
            if target < len {
                return (iv.lo + target).min(iv.hi);
            }
            target -= len;
        }
        // u * total rounded up to total
        self.intervals.last().map_or(0.0, |iv| iv.hi)
    }
}

/// Support of one class on the distinguishable axis at overlap level `mu`.
pub fn class_support(class: ClassId, mu: f64) -> Result<IntervalSet> {
    check_mu(mu)?;
    let grow = mu * REGION_WIDTH;
    let raw = class
        .base_regions()
        .iter()
        .map(|&(a, b)| Interval {
            lo: (a - grow).max(0.0),
            hi: (b + grow).min(1.0),
        })
        .collect();
    Ok(IntervalSet::from_intervals(raw))
}

/// Where both class densities are positive (and uniform).
pub fn ambiguous_region(mu: f64) -> Result<IntervalSet> {
    let minority = class_support(ClassId::Minority, mu)?;
    let majority = class_support(ClassId::Majority, mu)?;
    Ok(minority.intersect(&majority))
}

/// Expected fraction of generated points whose `x1` falls in the ambiguous
/// region. Both supports have the same length, so this does not depend on
/// the imbalance level.
pub fn ambiguous_mass(mu: f64) -> Result<f64> {
    let support = class_support(ClassId::Minority, mu)?.total_length();
    Ok(ambiguous_region(mu)?.total_length() / support)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    /// `[x1, x2]`; `x1` is the distinguishable coordinate.
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<ClassId>,
    /// Generating parameters. `None` for data read from disk.
    pub spec: Option<BackboneSpec>,
}

impl LabeledDataset {
    pub fn new(points: Vec<[f64; 2]>, labels: Vec<ClassId>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::parameter(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        Ok(LabeledDataset {
            points,
            labels,
            spec: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, class: ClassId) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }

    /// Copy of the rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            spec: None,
        }
    }
}

/// Draw a dataset. A pure function of `spec`, seed included.
pub fn generate(spec: &BackboneSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let minority = class_support(ClassId::Minority, spec.mu)?;
    let majority = class_support(ClassId::Majority, spec.mu)?;
    let mut rng = rng_from_seed(spec.seed);

    let mut labels = vec![ClassId::Minority; spec.minority_count()];
    labels.resize(spec.n, ClassId::Majority);
    labels.shuffle(&mut rng);

    let points = labels
        .iter()
        .map(|class| {
            let support = match class {
                ClassId::Minority => &minority,
                ClassId::Majority => &majority,
            };
            let x1 = support.sample(rng.random::<f64>());
            let x2 = rng.random::<f64>();
            [x1, x2]
        })
        .collect();

    Ok(LabeledDataset {
        points,
        labels,
        spec: Some(*spec),
    })
}

/// F1 (minority positive) of the Bayes-optimal rule under the generator's
/// densities and priors.
///
/// In the ambiguous region the rule picks the class with the larger
/// `prior * density`. At `alpha = 0.5` both choices are optimal for
/// accuracy; the one with the larger F1 is reported.
pub fn bayes_f1(mu: f64, alpha: f64) -> Result<f64> {
    check_mu(mu)?;
    check_alpha(alpha)?;
    let support = class_support(ClassId::Minority, mu)?.total_length();
    let ambiguous = ambiguous_region(mu)?.total_length();
    let p_min = 1.0 - alpha;
    let p_maj = alpha;

    let f1_for = |ambiguous_to_minority: bool| {
        let share = if ambiguous_to_minority { ambiguous / support } else { 0.0 };
        let tp = p_min * (support - ambiguous) / support + p_min * share;
        let fp = p_maj * share;
        let fn_ = p_min - tp;
        f1_from_rates(tp, fp, fn_)
    };

    Ok(if p_min > p_maj {
        f1_for(true)
    } else if p_min < p_maj {
        f1_for(false)
    } else {
        f1_for(true).max(f1_for(false))
    })
}

fn f1_from_rates(tp: f64, fp: f64, fn_: f64) -> f64 {
    let denom = 2.0 * tp + fp + fn_;
    if denom <= 0.0 {
        0.0
    } else {
        2.0 * tp / denom
    }
}
