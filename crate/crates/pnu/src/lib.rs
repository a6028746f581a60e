//! Semi-supervised binary classification from positive, negative, and
//! unlabeled samples.
//!
//! The crate represents every risk estimator as a weighted term table over
//! the three sample sets, trains linear-in-parameter classifiers by
//! minimizing those risks (closed form for quadratic losses, the
//! concave-convex procedure for the ramp loss), and ships the analytical
//! companions: asymptotic variances with their optimal combination weights,
//! generalization-bound calculators, risk-based model selection, and
//! energy-distance class-prior estimation.
//!
//! Module map:
//!
//! - [`loss`]: margin losses, composite forms, eligibility conditions.
//! - [`data`]: sample sets, CSV ingestion, scaling, synthetic generators,
//!   sampling protocols.
//! - [`risk`]: risk term tables for every family and empirical evaluation.
//! - [`model`]: Gaussian-kernel / raw-linear bases and classifiers.
//! - [`solver`]: closed-form ridge training and CCCP for ramp losses.
//! - [`selection`]: k-fold cross-validation scored by the PNU zero-one risk.
//! - [`theory`]: variance profiles, optimal combination weights, bounds.
//! - [`prior`]: class-prior estimation by energy-distance minimization.
//! - [`experiment`]: the resampling experiments behind the `exp-*`
//!   subcommands.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --release --example train_and_predict`.

pub mod data;
pub mod error;
pub mod experiment;
pub mod loss;
pub mod model;
pub mod prior;
pub mod risk;
pub mod selection;
pub mod solver;
pub mod theory;

pub use data::{ClassPrior, LabeledPool, SampleSet, ScalingRecord, TripleDataset};
pub use error::{Error, Result};
pub use experiment::{DataSource, ExperimentConfig, ExperimentReport};
pub use loss::{Loss, LossCondition};
pub use model::{Basis, CenterSelection, Classifier};
pub use prior::PriorEstimate;
pub use risk::{build_base, build_combined, build_pnu, PnuMode, RiskFamily, RiskSpec};
pub use selection::{cross_validate, CvConfig, CvReport, Grid};
pub use solver::{train, train_cccp, train_closed_form, TrainConfig};
pub use theory::{BoundInputs, VarianceProfile};
