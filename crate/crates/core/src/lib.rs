//! Momentum analysis for point-by-point racket-sport data.
//!
//! The pipeline runs, per match:
//!
//! 1. [`ingest`]: parse the point-by-point CSV and derive features `x1..x16`.
//! 2. [`streaks`]: tabulate winning streaks and test length/next-point independence.
//! 3. [`ewm`]: entropy weights over standardized features and the momentum series `M_t`.
//! 4. [`changepoint`]: two-sided CUSUM change points `CP_t` on `M_t`.
//! 5. [`shift`]: shift intensity `V_t` from the change points.
//! 6. [`stats`] / [`model`]: stepwise logistic selection, PSO-seeded networks, metrics.
//! 7. [`explain`]: exact Shapley attribution of the trained network.
//!
//! [`synth`] produces null and momentum-injected sequences for calibration;
//! [`pipeline`] chains steps 1 and 3-5 for a single match.

pub mod changepoint;
pub mod ewm;
pub mod explain;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod shift;
pub mod special;
pub mod stats;
pub mod streaks;
pub mod synth;

pub use changepoint::{cusum_detect, tune_threshold, ChangePoint, ChangePointSet, CusumParams, CusumTrace};
pub use ewm::{entropy_weights, momentum_series, MomentumSeries, WeightVector};
pub use explain::{mean_abs_shap, shapley_values, ShapConfig, ShapReport, ShapValues};
pub use ingest::{derive_features, parse_csv, standardize, FeatureFrame, FeatureId, MatchData, PointRecord};
pub use model::{pso_optimize, scenario_matrix, train_bp_pso, Dataset, NetConfig, Network, PsoConfig, Scenario, TrainedNet};
pub use pipeline::{analyze_match, MatchAnalysis, PipelineConfig};
pub use shift::{relative_distance, ShiftSeries};
pub use stats::{classification_metrics, fit_logistic, roc_auc, stepwise_select, LogisticModel, MetricsReport, SelectionTrace};
pub use streaks::{build_contingency, chi_squared_test, exact_test, extract_streaks, ContingencyTable, TestResult};
pub use synth::{calibrate, gen_annotated, gen_momentum, gen_null, GeneratorConfig};

/// Any error from the pipeline, carrying the module error unchanged.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Streak(#[from] streaks::StreakError),
    #[error(transparent)]
    Ewm(#[from] ewm::EwmError),
    #[error(transparent)]
    Changepoint(#[from] changepoint::ChangepointError),
    #[error(transparent)]
    Shift(#[from] shift::ShiftError),
    #[error(transparent)]
    Stats(#[from] stats::StatsError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Explain(#[from] explain::ExplainError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
    #[error("no matches to analyze")]
    Empty,
}
