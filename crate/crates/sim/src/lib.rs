//! Scenario configs, bundled data, experiment runners and result files for
//! the `squint` command-line tool.

pub mod config;
pub mod data;
pub mod error;
pub mod output;
pub mod run;

pub use config::{LoadedScenario, Scenario};
pub use error::{Result, SimError};
