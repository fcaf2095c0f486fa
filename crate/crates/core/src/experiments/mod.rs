//! Manifest-driven experiment runs and the bundled acceptance suite.

mod acceptance;
pub mod fixtures;
mod manifest;
mod run;

pub use acceptance::{
    acceptance, peak_rss_bytes, run_criterion, AcceptanceLevel, AcceptanceReport, CriterionResult, CRITERIA,
};
pub use manifest::{parse_param, Experiment, Manifest, Params, RunError, RunResult};
pub use run::{execute, results_csv, run, RunArtifacts, RunOutcome};
