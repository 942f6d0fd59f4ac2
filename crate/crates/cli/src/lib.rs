//! Command-line laboratory: reveal-pattern experiments, recoverability
//! probes, and report generation on top of the core numerics crate.

pub mod config;
pub mod experiment;
pub mod probe;

pub use config::{parse_experiment_config, ExperimentConfig, PatternFamily};
pub use experiment::{
    build_mask, run_completion_experiment, synthesize_ground_truth, write_reports,
    ExperimentReport, SizeRow,
};
pub use probe::{probe_stable_recovery, ProbeConfig, ProbeOutcome, ProbeVerdict};
