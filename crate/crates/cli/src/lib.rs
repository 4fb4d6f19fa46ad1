//! Experiment runner for the SWIPT integrated-receiver capacity study.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ConfigError, ExperimentConfig, Format, Method};
pub use experiments::{run_capacity_sweep, run_lemma1_curve, run_oracle_validation, Check, Lemma1Row, SweepRow};
