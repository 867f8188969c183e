//! Confusion counts and F1 with the minority class as the positive class.

use serde::Serialize;

use crate::backbone::{ClassId, LabeledDataset};
use crate::svm::SvmModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Support vectors over training size.
    pub complexity: f64,
}

impl EvalResult {
    /// # Panics
    /// If `truth` and `pred` differ in length.
    pub fn from_predictions(truth: &[ClassId], pred: &[ClassId], complexity: f64) -> Self {
        assert_eq!(truth.len(), pred.len(), "truth and prediction lengths differ");
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for (t, p) in truth.iter().zip(pred) {
            match (t, p) {
                (ClassId::Minority, ClassId::Minority) => tp += 1,
                (ClassId::Majority, ClassId::Minority) => fp += 1,
                (ClassId::Minority, ClassId::Majority) => fn_ += 1,
                (ClassId::Majority, ClassId::Majority) => tn += 1,
            }
        }
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalResult {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
            complexity,
        }
    }
}

pub fn evaluate(model: &SvmModel, test: &LabeledDataset) -> EvalResult {
    EvalResult::from_predictions(&test.labels, &model.predict_all(test), model.complexity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassId::{Majority as M, Minority as P};

    #[test]
    fn hand_counts() {
        let truth = [P, P, P, P, M, M];
        let pred = [P, P, P, M, P, M];
        let r = EvalResult::from_predictions(&truth, &pred, 0.25);
        assert_eq!((r.tp, r.fp, r.fn_, r.tn), (3, 1, 1, 1));
        assert_eq!(r.precision, 0.75);
        assert_eq!(r.recall, 0.75);
        assert!((r.f1 - 0.75).abs() < 1e-15);
        assert_eq!(r.complexity, 0.25);
    }

    #[test]
    fn degenerate_predictions() {
        let truth = [P, M, M];
        assert_eq!(EvalResult::from_predictions(&truth, &truth, 0.0).f1, 1.0);
        let r = EvalResult::from_predictions(&truth, &[M, M, M], 0.0);
        assert_eq!((r.recall, r.f1), (0.0, 0.0));
    }
}
