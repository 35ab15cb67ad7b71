//! Scenario runner for the `modent` command-line tool: configuration,
//! figure presets, CSV output and the self-check suite.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod selfcheck;

pub use config::{validate_config, Measure, Model, ScenarioConfig};
pub use error::{CliError, ConfigIssue, IssueKind};
pub use run::{run_scenario, MeasureSeries};
