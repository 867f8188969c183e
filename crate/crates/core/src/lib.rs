//! Synthetic overlap/imbalance benchmarks for RBF support vector machines,
//! with spectral rank reduction of trained models and the measurements built
//! on top of it (hyperplane angles, label-change tracking, sufficiency
//! points).
//!
//! The crate is organized bottom-up:
//!
//! * [`backbone`] draws the two-dimensional benchmark datasets and knows
//!   their analytic ground truth.
//! * [`linalg`] holds the dense symmetric linear algebra.
//! * [`svm`] trains and evaluates C-SVC models and reads/writes model files.
//! * [`select`] picks `(C, gamma)` by simulated annealing on cross-validated F1.
//! * [`spectral`] builds rank-reduced approximations of a trained model.
//! * [`analysis`] turns all of the above into measurements.
//! * [`experiment`] runs whole pipelines and writes CSV output.

pub mod analysis;
pub mod backbone;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod numfmt;
pub mod seed;
pub mod select;
pub mod spectral;
pub mod svm;

pub use error::{Error, Result};
