//! Binary soft-margin C-SVC with an RBF kernel.
//!
//! Labels follow the minority-positive convention: minority is `+1`,
//! majority is `-1`, and a decision value of exactly zero goes to the
//! majority class.

mod persist;
mod smo;

use serde::{Deserialize, Serialize};

use crate::backbone::{ClassId, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

pub use persist::{load_model, load_model_file, save_model, save_model_file, ModelFile, ReductionMeta};
pub use smo::{train, train_with_status, TrainStatus};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbfKernel {
    gamma: f64,
}

impl RbfKernel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::parameter(format!("gamma must be positive, got {gamma}")));
        }
        Ok(RbfKernel { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `exp(-gamma * |a - b|^2)`; symmetric bit for bit and exactly 1 on the
    /// diagonal.
    #[inline]
    pub fn eval(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let d0 = a[0] - b[0];
        let d1 = a[1] - b[1];
        (-self.gamma * (d0 * d0 + d1 * d1)).exp()
    }

    pub fn gram(&self, points: &[[f64; 2]]) -> SymMatrix {
        SymMatrix::from_fn(points.len(), |i, j| self.eval(&points[i], &points[j]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Box constraint `C`.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub kkt_tol: f64,
    /// Iteration cap, in units of the training-set size.
    pub max_passes: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            kkt_tol: 1e-3,
            max_passes: 2000,
        }
    }
}

impl TrainConfig {
    pub fn with_c(c: f64) -> Self {
        TrainConfig {
            c,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::parameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.kkt_tol > 0.0) {
            return Err(Error::parameter(format!(
                "kkt_tol must be positive, got {}",
                self.kkt_tol
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::parameter("max_passes must be at least 1"));
        }
        Ok(())
    }
}

/// A trained (or rebuilt) kernel expansion
/// `f(x) = sum_i coeffs[i] * K(sv_i, x) + bias`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub support_vectors: Vec<[f64; 2]>,
    /// `alpha_i * y_i`.
    pub coeffs: Vec<f64>,
    pub bias: f64,
    pub kernel: RbfKernel,
    /// The `C` the model was trained with.
    pub c: f64,
    pub training_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionValue {
    /// Kernel expansion plus bias.
    pub value: f64,
    pub label: ClassId,
}

impl DecisionValue {
    pub fn from_value(value: f64) -> Self {
        let label = if value > 0.0 {
            ClassId::Minority
        } else {
            ClassId::Majority
        };
        DecisionValue { value, label }
    }
}

impl SvmModel {
    pub fn new(
        support_vectors: Vec<[f64; 2]>,
        coeffs: Vec<f64>,
        bias: f64,
        kernel: RbfKernel,
        c: f64,
        training_size: usize,
    ) -> Result<Self> {
        if support_vectors.is_empty() || support_vectors.len() != coeffs.len() {
            return Err(Error::Contract(format!(
                "model needs matching, non-empty support vectors and coefficients \
                 ({} vs {})",
                support_vectors.len(),
                coeffs.len()
            )));
        }
        Ok(SvmModel {
            support_vectors,
            coeffs,
            bias,
            kernel,
            c,
            training_size,
        })
    }

    pub fn n_support(&self) -> usize {
        self.support_vectors.len()
    }

    pub fn decision_value(&self, x: &[f64; 2]) -> f64 {
        let mut s = 0.0;
        for (sv, c) in self.support_vectors.iter().zip(&self.coeffs) {
            s += c * self.kernel.eval(sv, x);
        }
        s + self.bias
    }

    pub fn decision(&self, x: &[f64; 2]) -> DecisionValue {
        DecisionValue::from_value(self.decision_value(x))
    }

    pub fn predict(&self, x: &[f64; 2]) -> ClassId {
        self.decision(x).label
    }

    pub fn predict_all(&self, data: &LabeledDataset) -> Vec<ClassId> {
        data.points.iter().map(|p| self.predict(p)).collect()
    }

    /// Gram matrix of the support vectors.
    pub fn kernel_matrix(&self) -> SymMatrix {
        self.kernel.gram(&self.support_vectors)
    }

    /// Dual objective `1/2 a^T Q a - sum a` in the minimization form, where
    /// `a_i = |coeffs[i]|` and `Q_ij = y_i y_j K_ij`.
    pub fn dual_objective(&self) -> f64 {
        let n = self.n_support();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += self.coeffs[i]
                    * self.coeffs[j]
                    * self.kernel.eval(&self.support_vectors[i], &self.support_vectors[j]);
            }
        }
        0.5 * quad - self.coeffs.iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Proportion of the training set kept as support vectors.
    pub fn complexity(&self) -> f64 {
        if self.training_size == 0 {
            0.0
        } else {
            self.n_support() as f64 / self.training_size as f64
        }
    }
}
