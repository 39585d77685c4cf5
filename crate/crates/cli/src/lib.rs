//! Configuration-driven experiment runner for the ring-cavity simulator:
//! config loading with unit-suffixed values, CSV/PGM/PNG emission, the
//! scenario implementations behind the `sim` binary, and the run manifest.

pub mod config;
pub mod csvout;
pub mod image;
pub mod manifest;
pub mod scenarios;
pub mod units;

pub use config::{load_config, parse_config, ConfigError, ScenarioConfig};
pub use scenarios::{run_fig3_scenario, run_fig4_scenario, run_property_suite, RunArtifacts};
