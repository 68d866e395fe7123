//! Split conformal prediction for regression with asymmetric intervals.
//!
//! The crate builds prediction intervals with finite-sample marginal coverage
//! by splitting the data into a training part, used to fit score models, and a
//! calibration part, used to pick an interval radius from an order statistic
//! of nonconformity scores. Three interval constructions are provided:
//!
//! * **skew**: intervals `[mu - r*sigma*exp(-gamma), mu + r*sigma*exp(gamma)]`
//!   whose two arms are tilted by a learned per-point asymmetry `gamma(x)`;
//! * **scaled**: classic residual intervals `mu ± r*sigma` normalized by a
//!   learned spread `sigma(x)`;
//! * **cqr**: conformalized quantile regression on top of a quantile forest.
//!
//! All base learners (CART regression trees, bagged forests, and the weighted
//! quantile forest) are implemented here from scratch with explicit seeding,
//! so every artifact in the pipeline is reproducible from a single `u64` seed.
//!
//! Module map:
//! * [`data`]: datasets, CSV ingestion, categorical encoding, seeded splits.
//! * [`learners`]: trees and forests (mean and quantile modes).
//! * [`conformal`]: scores, thresholds, model fitting, interval prediction.
//! * [`efficiency`]: width-ratio diagnostics comparing skew against scaled.
//! * [`synth`]: synthetic generators with analytic conditional quantiles.
//! * [`eval`]: benchmark harness, coverage/length metrics, report writers.
//! * [`validate`]: replication-based statistical checks (coverage bands,
//!   estimator convergence).

pub mod conformal;
pub mod data;
pub mod efficiency;
pub mod eval;
mod exact;
pub mod learners;
pub mod seeding;
pub mod synth;
pub mod validate;
