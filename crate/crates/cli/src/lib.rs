//! Experiment orchestration: declarative plans, seeded random histories,
//! ground-truth runs with coefficient-truncation sweeps, the downstream
//! analysis pipeline, and table emission.

pub mod experiment;
pub mod history;
pub mod io;
pub mod plan;
pub mod report;

pub use experiment::{run_experiment, ExperimentOutcome};
pub use history::random_history;
pub use plan::{ExperimentPlan, SystemConfig};
pub use report::{report, Summary};
