//! Scenario runner and benchmark harness for NAC-ABE on a simulated
//! network.
//!
//! A [`ScenarioConfig`] names the nodes, links, grants, productions and
//! expected consumption outcomes; [`run_scenario`] executes it on virtual
//! time and returns a [`RunReport`] that serializes to JSON lines.

pub mod bench;
pub mod config;
pub mod report;
pub mod runner;

pub use config::{bundled, ConfigError, Expected, ScenarioConfig, BUNDLED};
pub use report::{Event, Outcome, RunReport};
pub use runner::{run_scenario, run_scenario_world, RunError, World};
