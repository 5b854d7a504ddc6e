//! Scenario files, trajectory export and Monte Carlo trials.

pub mod bundled;
mod export;
mod scenario;
mod trials;

pub use export::{export_trajectory, import_trajectory, read_trajectory, write_trajectory, RUNNING, TRAJECTORY_HEADER};
pub use scenario::{load_scenario, Scenario, SCHEMA_VERSION};
#[cfg(feature = "parallel")]
pub use trials::run_trials_parallel;
pub use trials::{
    run_trial, run_trials, run_trials_sequential, PerturbationModel, SuccessSpec, Target, TrialOutcome,
    TrialReport, TrialResult,
};
