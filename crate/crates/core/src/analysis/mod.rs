//! Measurement pipelines built on trained and reduced models.

pub mod covert;
pub mod independence;
pub mod metrics;
pub mod sweep;

pub use covert::{
    label_changes, localization, series_metrics, sufficiency, LabelChangeMatrix, Localization,
    SeriesPoint, SufficiencyReport, DEFAULT_DELTA, HISTOGRAM_BINS,
};
pub use independence::{
    compare_path, detect_breakpoint, fit_independence, predict_performance, IndependenceModel,
    IndependenceRow,
};
pub use metrics::{evaluate, EvalResult};
pub use sweep::{sweep, PerformanceSurface, Selection, SurfaceCell, SweepAxis, SweepConfig};
