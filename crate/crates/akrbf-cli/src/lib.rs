//! Experiment harness for the adaptive-kernel RBF network: configuration,
//! the four-arm comparison runner, and the gradient self-check.

pub mod config;
pub mod error;
pub mod experiment;
pub mod gradcheck;

pub use config::{build_configs, ArmSelection, CliOverrides};
pub use error::{CliError, CliResult};
pub use experiment::{
    emit_kernel_map, run_experiment, run_suite, Arm, CentersStrategy, DataSource,
    ExperimentConfig, ExperimentKind, RunSummary, ALL_ARMS,
};
pub use gradcheck::{gradcheck, GradcheckReport, FD_STEP, REL_TOLERANCE};
