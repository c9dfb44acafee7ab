//! File formats, experiment bundles and sweeps on top of `wpsd-core`.
//!
//! A run takes an [`ExperimentConfig`] (scenario, length, seed, estimator
//! list, optional bands and baseline), synthesizes the source, runs every
//! estimator, measures each estimate and grades the baseline against the
//! rest. [`run_experiment`] writes the bundle only once everything has
//! succeeded:
//!
//! - `psd_<desc>.csv` and `metrics_<desc>.json` per estimator,
//! - `comparison.txt`, `comparison.json`, `comparison.csv`,
//! - `manifest.json` with the config echo, seed, version and a SHA-256 per file.

mod error;
pub mod estimator;
pub mod experiment;
pub mod formats;
mod params;

pub use error::{Error, Result};
pub use estimator::{default_nfft, EstimatorSpec};
pub use experiment::{
    evaluate_config, parse_band, run_experiment, sweep, verify_bundle, Bundle, ExperimentConfig,
    Manifest, Outcome, ScenarioSpec,
};
pub use formats::load_filter;
