//! Experiment harness for slotted ALOHA with capture over cell-free,
//! user-centric, cellular and small-cell uplinks.
//!
//! [`config`] holds the parameters, [`harness`] runs seeded Monte Carlo
//! points and sweeps, and [`output`] writes CSV and SVG. The numerical
//! models live in [`cellfree_aloha_core`].

pub mod config;
pub mod harness;
pub mod output;

pub use cellfree_aloha_core as core;
pub use config::{Scenario, SimulationConfig};
pub use harness::{run_networks, run_point, sweep_l, sweep_n, sweep_pi, SweepAxis, ThroughputResult};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] cellfree_aloha_core::Error),
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("no results to write")]
    EmptyResults,
}
