//! Simulation parameters and their conversion to linear units.
//!
//! Every default reproduces the reference scenario: 200 users on a wrapped
//! 1 km² area, 64 receive antennas split as 16 APs × 4, B = 1 MHz,
//! σ² = −109 dBm, τ_d = 10 of τ_c = 20 symbols, α = 3 dB, clusters of the
//! 4 nearest APs and 20 dBm transmit power.
//!
//! The capture threshold is configured in dB (`alpha_db`). It is an SINR
//! ratio, so a value of 3 means 3 dB (≈ 1.995 linear), not 3 dBm.

use std::fs;
use std::path::Path;

use cellfree_aloha_core::detection::{ReceiverMode, SmallCellAssociation};
use cellfree_aloha_core::metrics::{Prefactor, ThroughputParams};
use cellfree_aloha_core::topology::{db_to_linear, dbm_to_watts, Area, PathLossModel};
use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Potential users `K`.
    pub users: usize,
    pub area_side_m: f64,
    pub wrap_around: bool,
    /// Path-loss clamp floor, meters.
    pub min_distance_m: f64,
    pub bandwidth_hz: f64,
    /// Noise power over the whole band, dBm.
    pub noise_dbm: f64,
    pub tau_d: f64,
    pub tau_c: f64,
    /// Capture threshold, dB.
    pub alpha_db: f64,
    /// Receive antennas in the network, `M`.
    pub total_antennas: usize,
    /// Distributed APs, `L`.
    pub aps: usize,
    /// Antennas per distributed AP, `N`.
    pub antennas_per_ap: usize,
    /// APs per user-centric cluster.
    pub cluster_size: usize,
    /// Per-user transmit power, dBm.
    pub tx_power_dbm: f64,
    /// Activation probability.
    pub pi: f64,
    pub trials: u64,
    /// Index of the first trial; trials `first_trial..first_trial + trials` are run.
    pub first_trial: u64,
    pub seed: u64,
    pub networks: Vec<ReceiverMode>,
    /// Draw one layout and keep it for every trial.
    pub fixed_layout: bool,
    pub throughput_prefactor: Prefactor,
    pub smallcell_association: SmallCellAssociation,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            users: 200,
            area_side_m: 1000.0,
            wrap_around: true,
            min_distance_m: 1.0,
            bandwidth_hz: 1e6,
            noise_dbm: -109.0,
            tau_d: 10.0,
            tau_c: 20.0,
            alpha_db: 3.0,
            total_antennas: 64,
            aps: 16,
            antennas_per_ap: 4,
            cluster_size: 4,
            tx_power_dbm: 20.0,
            pi: 0.1,
            trials: 2000,
            first_trial: 0,
            seed: 1,
            networks: ReceiverMode::ALL.to_vec(),
            fixed_layout: false,
            throughput_prefactor: Prefactor::TwoB,
            smallcell_association: SmallCellAssociation::StrongestPath,
        }
    }
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Pilot symbols per coherence block; informational only.
    pub fn tau_p(&self) -> f64 {
        self.tau_c - self.tau_d
    }

    /// Checks every field and converts to linear units.
    pub fn resolve(&self) -> Result<Scenario, SimError> {
        let bad = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.users == 0 {
            return bad("users must be at least 1");
        }
        if self.aps == 0 || self.antennas_per_ap == 0 {
            return bad("aps and antennas_per_ap must be at least 1");
        }
        if self.aps * self.antennas_per_ap != self.total_antennas {
            return Err(SimError::Config(format!(
                "aps × antennas_per_ap = {} × {} does not equal total_antennas = {}",
                self.aps, self.antennas_per_ap, self.total_antennas
            )));
        }
        if self.cluster_size == 0 {
            return bad("cluster_size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.pi) {
            return Err(SimError::Config(format!("pi = {} is outside [0, 1]", self.pi)));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.networks.is_empty() {
            return bad("at least one network must be selected");
        }
        if !self.min_distance_m.is_finite() || self.min_distance_m <= 0.0 {
            return bad("min_distance_m must be positive");
        }
        if !self.noise_dbm.is_finite() || !self.tx_power_dbm.is_finite() || !self.alpha_db.is_finite() {
            return bad("noise_dbm, tx_power_dbm and alpha_db must be finite");
        }
        let area = Area::new(self.area_side_m, self.wrap_around)?;
        let alpha = db_to_linear(self.alpha_db);
        let throughput = ThroughputParams::new(
            alpha,
            self.tau_d,
            self.tau_c,
            self.bandwidth_hz,
            self.throughput_prefactor,
        )?;
        let mut networks = self.networks.clone();
        networks.sort();
        networks.dedup();
        Ok(Scenario {
            users: self.users,
            aps: self.aps,
            antennas_per_ap: self.antennas_per_ap,
            cellular_antennas: self.total_antennas,
            cluster_size: self.cluster_size.min(self.aps),
            area,
            path_loss: PathLossModel::with_min_distance(self.min_distance_m),
            noise_power: dbm_to_watts(self.noise_dbm),
            tx_power: dbm_to_watts(self.tx_power_dbm),
            alpha,
            throughput,
            pi: self.pi,
            seed: self.seed,
            trials: self.first_trial..self.first_trial + self.trials,
            networks,
            fixed_layout: self.fixed_layout,
            association: self.smallcell_association,
        })
    }
}

/// A validated configuration in linear units, ready to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub users: usize,
    pub aps: usize,
    pub antennas_per_ap: usize,
    /// Antennas of the single cellular site.
    pub cellular_antennas: usize,
    /// Cluster size after clamping to the number of APs.
    pub cluster_size: usize,
    pub area: Area,
    pub path_loss: PathLossModel,
    /// Watts.
    pub noise_power: f64,
    /// Watts, same for every user.
    pub tx_power: f64,
    /// Linear capture threshold.
    pub alpha: f64,
    pub throughput: ThroughputParams,
    pub pi: f64,
    pub seed: u64,
    pub trials: std::ops::Range<u64>,
    /// Sorted, without duplicates.
    pub networks: Vec<ReceiverMode>,
    pub fixed_layout: bool,
    pub association: SmallCellAssociation,
}
