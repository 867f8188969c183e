//! Spectral rank reduction of trained SVMs.
//!
//! The kernel matrix `Q` of the support vectors is eigen-truncated to rank
//! `r`; an LUP decomposition of the truncated matrix picks `r` linearly
//! independent rows, and those support vectors are kept. Each removed vector
//! is replaced by its projection onto the span of the kept ones in the
//! kernel's feature space, which folds its coefficient into the kept
//! coefficients:
//!
//! ```text
//! c'_i = c_i + sum_{j in D} c_j * beta_{j,i},   K_II beta_j = k_I(x_j)
//! ```
//!
//! The bias is copied unchanged. Every rank is reduced from the original
//! model, never from another reduction.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigh, lup_with_tol, Cholesky, EigenDecomp, Matrix, SymMatrix, PIVOT_TOL};
use crate::svm::{save_model, ModelFile, RbfKernel, ReductionMeta, SvmModel};

/// Diagonal jitter, relative to `trace / n`, used when a retained-set Gram
/// block is numerically singular.
pub const PROJECTION_JITTER: f64 = 1e-10;

/// Fallback pivot tolerances tried when the truncated matrix does not show
/// the requested number of pivots at [`PIVOT_TOL`].
const FALLBACK_TOLS: [f64; 3] = [1e-12, 1e-14, 1e-15];

/// Pivot tolerances tried in turn for the essential set, stopping at the
/// first whose reconstruction is within [`ESSENTIAL_TARGET`].
const ESSENTIAL_TOLS: [f64; 4] = [PIVOT_TOL, 1e-11, 1e-12, 1e-13];

/// Largest decision-value change accepted for the essential set, measured
/// at the base support vectors and on a [`PROBE_STEPS`]-square grid over the
/// unit square.
pub const ESSENTIAL_TARGET: f64 = 1e-7;

const PROBE_STEPS: usize = 41;

/// Anything that is a weighted sum of kernel functions centred on
/// support vectors.
pub trait KernelExpansion {
    fn kernel(&self) -> RbfKernel;
    fn support_vectors(&self) -> &[[f64; 2]];
    fn coeffs(&self) -> &[f64];
}

impl KernelExpansion for SvmModel {
    fn kernel(&self) -> RbfKernel {
        self.kernel
    }
    fn support_vectors(&self) -> &[[f64; 2]] {
        &self.support_vectors
    }
    fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// A model rebuilt from a subset of another model's support vectors.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub base: Arc<SvmModel>,
    /// Kept support-vector indices into `base`, ascending.
    pub retained: Vec<usize>,
    /// Dropped indices, ascending.
    pub removed: Vec<usize>,
    /// The rebuilt model: retained vectors, updated coefficients, base bias.
    pub model: SvmModel,
}

impl ReducedModel {
    pub fn rank(&self) -> usize {
        self.retained.len()
    }

    /// File representation, tagged with the hash of the saved base model.
    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            model: self.model.clone(),
            reduction: Some(ReductionMeta {
                base_hash: model_hash(&self.base),
                rank: self.rank(),
                retained_indices: self.retained.clone(),
            }),
        }
    }
}

impl KernelExpansion for ReducedModel {
    fn kernel(&self) -> RbfKernel {
        self.model.kernel
    }
    fn support_vectors(&self) -> &[[f64; 2]] {
        &self.model.support_vectors
    }
    fn coeffs(&self) -> &[f64] {
        &self.model.coeffs
    }
}

/// SHA-256 (hex) of the saved model bytes.
pub fn model_hash(model: &SvmModel) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(save_model(model)))
}

/// Coordinates of the removed vectors with respect to the retained ones.
#[derive(Clone, Debug)]
pub struct ProjectionCoeffs {
    pub retained: Vec<usize>,
    pub removed: Vec<usize>,
    /// Row `j` holds `beta_j` for `removed[j]`, one column per retained index.
    pub beta: Matrix,
    /// Whether diagonal jitter was needed to factor `K_II`.
    pub jittered: bool,
}

impl ProjectionCoeffs {
    /// Solve `K_II beta_j = k_I(x_j)` for every removed `j`.
    pub fn compute(q: &SymMatrix, retained: &[usize], removed: &[usize]) -> Result<Self> {
        let k_ii = q.principal(retained);
        let (chol, jittered) = match Cholesky::factor(&k_ii) {
            Ok(c) => (c, false),
            Err(_) => {
                let n = retained.len().max(1) as f64;
                let jitter = PROJECTION_JITTER * k_ii.trace() / n;
                let bumped = SymMatrix::from_fn(retained.len(), |a, b| {
                    k_ii[(a, b)] + if a == b { jitter } else { 0.0 }
                });
                (Cholesky::factor(&bumped)?, true)
            }
        };
        let mut beta = Matrix::zeros(removed.len(), retained.len());
        for (row, &j) in removed.iter().enumerate() {
            let rhs: Vec<f64> = retained.iter().map(|&i| q[(i, j)]).collect();
            let sol = chol.solve(&rhs);
            beta.row_mut(row).copy_from_slice(&sol);
        }
        Ok(ProjectionCoeffs {
            retained: retained.to_vec(),
            removed: removed.to_vec(),
            beta,
            jittered,
        })
    }

    /// `sum_j ||phi(x_j) - Proj_I phi(x_j)||^2` in the feature space.
    pub fn residual(&self, q: &SymMatrix) -> f64 {
        self.removed
            .iter()
            .enumerate()
            .map(|(row, &j)| {
                let b = self.beta.row(row);
                let explained: f64 = self
                    .retained
                    .iter()
                    .zip(b)
                    .map(|(&i, bi)| bi * q[(i, j)])
                    .sum();
                q[(j, j)] - explained
            })
            .sum()
    }
}

/// Reusable state for reducing one base model at many ranks: its kernel
/// matrix, eigendecomposition and essential support set.
#[derive(Clone, Debug)]
pub struct SpectralReducer {
    base: Arc<SvmModel>,
    q: SymMatrix,
    eig: EigenDecomp,
    essential: Vec<usize>,
    essential_tol: f64,
}

impl SpectralReducer {
    pub fn new(model: &SvmModel) -> Result<Self> {
        Self::from_arc(Arc::new(model.clone()))
    }

    pub fn from_arc(base: Arc<SvmModel>) -> Result<Self> {
        let q = base.kernel_matrix();
        let eig = eigh(&q)?;
        let mut reducer = SpectralReducer {
            base,
            q,
            eig,
            essential: Vec::new(),
            essential_tol: PIVOT_TOL,
        };
        reducer.find_essential()?;
        Ok(reducer)
    }

    // A vector whose LUP pivot is `p` lies about `sqrt(p)` from the span of
    // the others, which times its coefficient can exceed the target on
    // ill-conditioned kernels. Tighten the tolerance until it does not.
    fn find_essential(&mut self) -> Result<()> {
        let n = self.base.n_support();
        let mut best: Option<(f64, Vec<usize>, f64)> = None;
        for tol in ESSENTIAL_TOLS {
            let rows = lup_with_tol(self.q.as_matrix(), tol)?.pivot_rows().to_vec();
            if rows.len() == n {
                best = Some((0.0, rows, tol));
                break;
            }
            let dev = self.deviation(&self.rebuild(rows.clone())?.model);
            if best.as_ref().is_none_or(|b| dev < b.0) {
                best = Some((dev, rows, tol));
            }
            if dev <= ESSENTIAL_TARGET {
                break;
            }
        }
        let (dev, rows, tol) = best.expect("tolerance ladder is non-empty");
        if dev > ESSENTIAL_TARGET {
            log::warn!("essential set changes decision values by up to {dev:e}");
        }
        self.essential = rows;
        self.essential_tol = tol;
        Ok(())
    }

    fn deviation(&self, other: &SvmModel) -> f64 {
        let h = 1.0 / (PROBE_STEPS - 1) as f64;
        let grid = (0..PROBE_STEPS * PROBE_STEPS)
            .map(|k| [(k / PROBE_STEPS) as f64 * h, (k % PROBE_STEPS) as f64 * h]);
        self.base
            .support_vectors
            .iter()
            .copied()
            .chain(grid)
            .map(|x| (self.base.decision_value(&x) - other.decision_value(&x)).abs())
            .fold(0.0, f64::max)
    }

    pub fn base(&self) -> &Arc<SvmModel> {
        &self.base
    }

    pub fn kernel_matrix(&self) -> &SymMatrix {
        &self.q
    }

    pub fn eigen(&self) -> &EigenDecomp {
        &self.eig
    }

    /// Numeric rank of the kernel matrix: LUP pivots at [`PIVOT_TOL`], or
    /// at the tighter tolerance the essential set needed.
    pub fn essential_rank(&self) -> usize {
        self.essential.len()
    }

    /// Pivot tolerance that defined the essential set.
    pub fn essential_tol(&self) -> f64 {
        self.essential_tol
    }

    /// Minimal independent support set; reproduces the base model's
    /// decision function.
    pub fn essential_set(&self) -> Result<ReducedModel> {
        self.rebuild(self.essential.clone())
    }

    /// Best approximation with `r` support vectors, `1 <= r <= essential_rank`.
    ///
    /// At the essential rank the truncation only removes numerically null
    /// directions, so the result is the essential set itself.
    pub fn reduce(&self, r: usize) -> Result<ReducedModel> {
        let max = self.essential_rank();
        if r == 0 || r > max {
            return Err(Error::parameter(format!(
                "rank {r} outside 1..={max} (essential rank)"
            )));
        }
        if r == max {
            return self.essential_set();
        }
        let truncated = self.eig.low_rank(r)?;
        let retained = pivot_rows(truncated.as_matrix(), r)?;
        self.rebuild(retained)
    }

    /// Ranks `1..=essential_rank`, each reduced independently.
    pub fn series(&self) -> Result<ReductionSeries> {
        let models = (1..=self.essential_rank())
            .into_par_iter()
            .map(|r| self.reduce(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReductionSeries {
            base: Arc::clone(&self.base),
            models,
        })
    }

    /// Feature-space projection residual of a candidate retained set.
    pub fn projection_residual(&self, retained: &[usize]) -> Result<f64> {
        let removed = complement(retained, self.base.n_support());
        Ok(ProjectionCoeffs::compute(&self.q, retained, &removed)?.residual(&self.q))
    }

    fn rebuild(&self, mut retained: Vec<usize>) -> Result<ReducedModel> {
        retained.sort_unstable();
        let removed = complement(&retained, self.base.n_support());
        let proj = ProjectionCoeffs::compute(&self.q, &retained, &removed)?;
        let base = &self.base;
        let mut coeffs: Vec<f64> = retained.iter().map(|&i| base.coeffs[i]).collect();
        for (row, &j) in removed.iter().enumerate() {
            let cj = base.coeffs[j];
            for (c, b) in coeffs.iter_mut().zip(proj.beta.row(row)) {
                *c += cj * b;
            }
        }
        let model = SvmModel::new(
            retained.iter().map(|&i| base.support_vectors[i]).collect(),
            coeffs,
            base.bias,
            base.kernel,
            base.c,
            base.training_size,
        )?;
        Ok(ReducedModel {
            base: Arc::clone(base),
            retained,
            removed,
            model,
        })
    }
}

// The first `r` pivot rows of an LUP decomposition, loosening the tolerance
// if the truncated matrix shows fewer.
fn pivot_rows(m: &Matrix, r: usize) -> Result<Vec<usize>> {
    let first = lup_with_tol(m, PIVOT_TOL)?;
    if first.numeric_rank >= r {
        return Ok(first.permutation[..r].to_vec());
    }
    for tol in FALLBACK_TOLS {
        let d = lup_with_tol(m, tol)?;
        if d.numeric_rank >= r {
            return Ok(d.permutation[..r].to_vec());
        }
    }
    Err(Error::numerical(format!(
        "truncated kernel matrix shows only {} independent rows, wanted {r}",
        first.numeric_rank
    )))
}

fn complement(retained: &[usize], n: usize) -> Vec<usize> {
    let mut keep = vec![false; n];
    for &i in retained {
        keep[i] = true;
    }
    (0..n).filter(|&i| !keep[i]).collect()
}

/// Reduced models of one base model at ranks `1..=R`.
#[derive(Clone, Debug)]
pub struct ReductionSeries {
    pub base: Arc<SvmModel>,
    /// Ordered by ascending rank.
    pub models: Vec<ReducedModel>,
}

impl ReductionSeries {
    pub fn essential_rank(&self) -> usize {
        self.models.last().map_or(0, ReducedModel::rank)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.models.iter().map(ReducedModel::rank).collect()
    }

    pub fn at_rank(&self, r: usize) -> Option<&ReducedModel> {
        self.models.iter().find(|m| m.rank() == r)
    }
}

pub fn essential_set(model: &SvmModel) -> Result<ReducedModel> {
    SpectralReducer::new(model)?.essential_set()
}

pub fn reduce(model: &SvmModel, r: usize) -> Result<ReducedModel> {
    SpectralReducer::new(model)?.reduce(r)
}

pub fn build_series(model: &SvmModel) -> Result<ReductionSeries> {
    SpectralReducer::new(model)?.series()
}

// sum_i a_i sum_j K(x_i, y_j) b_j
fn cross_term(a: &dyn KernelExpansion, b: &dyn KernelExpansion) -> f64 {
    let kernel = a.kernel();
    let mut total = 0.0;
    for (xa, ca) in a.support_vectors().iter().zip(a.coeffs()) {
        let mut inner = 0.0;
        for (xb, cb) in b.support_vectors().iter().zip(b.coeffs()) {
            inner += kernel.eval(xa, xb) * cb;
        }
        total += ca * inner;
    }
    total
}

/// Cosine of the angle between two hyperplane normals in the kernel's
/// feature space. Both models must use the same kernel. The result is
/// symmetric in its arguments bit for bit and clamped to `[-1, 1]`.
pub fn hyperplane_cosine(a: &dyn KernelExpansion, b: &dyn KernelExpansion) -> Result<f64> {
    if a.kernel().gamma().to_bits() != b.kernel().gamma().to_bits() {
        return Err(Error::Contract(format!(
            "hyperplane angle needs a shared kernel (gamma {} vs {})",
            a.kernel().gamma(),
            b.kernel().gamma()
        )));
    }
    let cross = 0.5 * (cross_term(a, b) + cross_term(b, a));
    let norm_a = cross_term(a, a);
    let norm_b = cross_term(b, b);
    if !(norm_a > 0.0 && norm_b > 0.0) {
        return Err(Error::Degenerate(format!(
            "hyperplane normal has non-positive squared norm ({norm_a:e}, {norm_b:e})"
        )));
    }
    Ok((cross / (norm_a * norm_b).sqrt()).clamp(-1.0, 1.0))
}
