//! Monte Carlo driver.
//!
//! Each trial is one slot: a layout, an activity draw, fresh Rayleigh fading
//! and one SINR evaluation per requested network. Trial `t` reads its random
//! numbers from dedicated ChaCha8 streams keyed by `(seed, t, purpose)`, so
//! results do not depend on scheduling, and splitting a run into trial ranges
//! reproduces the same per-trial samples.
//!
//! All networks in a trial share users, activity and (for the distributed
//! ones) APs and channels. Only active users are materialized: the slot's
//! layout, path loss and fading are built for the `K_a` transmitters.

use std::fmt;

use cellfree_aloha_core::channel::{assemble_channel, sample_small_scale};
use cellfree_aloha_core::clustering::{full_clusters, nearest_ap_clusters, strongest_ap_clusters};
use cellfree_aloha_core::detection::{ReceiverConfig, ReceiverMode, SlotDetector};
use cellfree_aloha_core::metrics::sum_throughput;
use cellfree_aloha_core::topology::{large_scale_matrix, place_uniform, Layout, Point};
use cellfree_aloha_core::traffic::{sample_activity, SlotActivity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Scenario, SimulationConfig};
use crate::SimError;

const STREAM_LAYOUT: u64 = 0;
const STREAM_ACTIVITY: u64 = 1;
const STREAM_CHANNEL: u64 = 2;
const STREAM_CELLULAR: u64 = 3;
const STREAMS_PER_TRIAL: u64 = 4;

fn substream(seed: u64, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(STREAMS_PER_TRIAL) + purpose);
    rng
}

/// Sweep dimension a result belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Point,
    Pi,
    N,
    L,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Point => "point",
            SweepAxis::Pi => "pi",
            SweepAxis::N => "N",
            SweepAxis::L => "L",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputResult {
    pub network: ReceiverMode,
    pub sweep_axis: SweepAxis,
    pub axis_value: f64,
    /// APs and antennas per AP of this network (1 × M for cellular).
    pub aps: usize,
    pub antennas_per_ap: usize,
    pub users: usize,
    pub pi: f64,
    pub trials: u64,
    pub seed: u64,
    /// Mean sum-throughput, bits/s.
    pub mean_bps: f64,
    /// Standard error of the mean, bits/s.
    pub stderr_bps: f64,
    /// Set when fewer than two trials make the standard error meaningless.
    pub low_sample: bool,
}

/// Users transmitting in `trial`. The draw depends only on `(seed, trial)`
/// and π, and a larger π activates a superset of users.
pub fn trial_activity(sc: &Scenario, trial: u64) -> Result<SlotActivity, SimError> {
    Ok(sample_activity(sc.users, sc.pi, &mut substream(sc.seed, trial, STREAM_ACTIVITY))?)
}

/// Sum-throughput of one trial for every network in `sc.networks`, in that order.
pub fn trial_throughputs(sc: &Scenario, trial: u64) -> Result<Vec<f64>, SimError> {
    let layout_trial = if sc.fixed_layout { 0 } else { trial };
    let mut layout_rng = substream(sc.seed, layout_trial, STREAM_LAYOUT);
    let users = place_uniform(sc.users, &sc.area, &mut layout_rng);
    let aps = place_uniform(sc.aps, &sc.area, &mut layout_rng);
    let site = place_uniform(1, &sc.area, &mut layout_rng);

    let activity = trial_activity(sc, trial)?;
    let mut out = vec![0.0; sc.networks.len()];
    let k_a = activity.k_a();
    if k_a == 0 {
        return Ok(out);
    }
    let transmitters: Vec<Point> = activity.active().iter().map(|&k| users[k]).collect();
    let everyone = SlotActivity::from_users((0..k_a).collect());
    let receiver = ReceiverConfig::uniform(ReceiverMode::CellFreeFull, sc.noise_power, sc.tx_power, k_a, sc.alpha)?
        .with_association(sc.association);

    if sc.networks.iter().any(|&m| m != ReceiverMode::CellularMimo) {
        let layout = Layout::new(aps, transmitters.clone(), sc.antennas_per_ap, sc.area)?;
        let beta = large_scale_matrix(&layout, &sc.path_loss)?;
        let h = sample_small_scale(
            k_a,
            sc.aps,
            sc.antennas_per_ap,
            &mut substream(sc.seed, trial, STREAM_CHANNEL),
        );
        let channels = assemble_channel(&beta, h)?;
        let detector = SlotDetector::new(&channels, &everyone, &receiver)?;
        for (slot, &mode) in out.iter_mut().zip(&sc.networks) {
            let assignment = match mode {
                ReceiverMode::CellFreeFull => full_clusters(sc.aps, k_a, sc.antennas_per_ap)?,
                ReceiverMode::UserCentric => nearest_ap_clusters(&layout, sc.cluster_size)?,
                ReceiverMode::SmallCell => strongest_ap_clusters(&beta, sc.antennas_per_ap)?,
                ReceiverMode::CellularMimo => continue,
            };
            let sinrs = detector.detect_mode(mode, &assignment)?;
            *slot = sum_throughput(sinrs.values(), &sc.throughput);
        }
    }

    if let Some(idx) = sc.networks.iter().position(|&m| m == ReceiverMode::CellularMimo) {
        let layout = Layout::new(site, transmitters, sc.cellular_antennas, sc.area)?;
        let beta = large_scale_matrix(&layout, &sc.path_loss)?;
        let h = sample_small_scale(
            k_a,
            1,
            sc.cellular_antennas,
            &mut substream(sc.seed, trial, STREAM_CELLULAR),
        );
        let channels = assemble_channel(&beta, h)?;
        let cellular = full_clusters(1, k_a, sc.cellular_antennas)?;
        let sinrs = SlotDetector::new(&channels, &everyone, &receiver)?.detect_mode(ReceiverMode::CellularMimo, &cellular)?;
        out[idx] = sum_throughput(sinrs.values(), &sc.throughput);
    }
    Ok(out)
}

/// Per-trial throughputs for the scenario's trial range, `[trial][network]`.
pub fn simulate(sc: &Scenario) -> Result<Vec<Vec<f64>>, SimError> {
    sc.trials
        .clone()
        .into_par_iter()
        .map(|t| trial_throughputs(sc, t))
        .collect()
}

/// Mean and standard error (sample standard deviation over √n). A single
/// sample has standard error 0.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

/// `√(se_a² + se_b²)`, the standard error of a difference of two means.
pub fn pooled_stderr(a: &ThroughputResult, b: &ThroughputResult) -> f64 {
    a.stderr_bps.hypot(b.stderr_bps)
}

fn summarize(cfg: &SimulationConfig, sc: &Scenario, samples: &[Vec<f64>], axis: SweepAxis, axis_value: f64) -> Vec<ThroughputResult> {
    sc.networks
        .iter()
        .enumerate()
        .map(|(i, &network)| {
            let column: Vec<f64> = samples.iter().map(|row| row[i]).collect();
            let (mean_bps, stderr_bps) = mean_and_stderr(&column);
            let (aps, antennas_per_ap) = if network == ReceiverMode::CellularMimo {
                (1, sc.cellular_antennas)
            } else {
                (sc.aps, sc.antennas_per_ap)
            };
            let low_sample = column.len() < 2;
            if low_sample {
                log::warn!("{network}: only {} trial(s), standard error reported as 0", column.len());
            }
            ThroughputResult {
                network,
                sweep_axis: axis,
                axis_value,
                aps,
                antennas_per_ap,
                users: sc.users,
                pi: sc.pi,
                trials: cfg.trials,
                seed: sc.seed,
                mean_bps,
                stderr_bps,
                low_sample,
            }
        })
        .collect()
}

fn run_axis(cfg: &SimulationConfig, axis: SweepAxis, axis_value: f64) -> Result<Vec<ThroughputResult>, SimError> {
    let sc = cfg.resolve()?;
    log::info!(
        "{axis}={axis_value}: L={} N={} pi={} trials={}",
        sc.aps,
        sc.antennas_per_ap,
        sc.pi,
        cfg.trials
    );
    let samples = simulate(&sc)?;
    Ok(summarize(cfg, &sc, &samples, axis, axis_value))
}

/// Every configured network at a single operating point.
pub fn run_networks(cfg: &SimulationConfig) -> Result<Vec<ThroughputResult>, SimError> {
    run_axis(cfg, SweepAxis::Point, cfg.pi)
}

pub fn run_point(cfg: &SimulationConfig, network: ReceiverMode) -> Result<ThroughputResult, SimError> {
    let single = SimulationConfig {
        networks: vec![network],
        ..cfg.clone()
    };
    Ok(run_networks(&single)?.remove(0))
}

fn network_major(mut results: Vec<ThroughputResult>) -> Vec<ThroughputResult> {
    // Stable: grid order is kept within each network.
    results.sort_by_key(|r| r.network);
    results
}

fn check_grid<T>(grid: &[T]) -> Result<(), SimError> {
    if grid.is_empty() {
        return Err(SimError::Config("sweep grid is empty".into()));
    }
    Ok(())
}

/// Sum-throughput against the activation probability.
pub fn sweep_pi(cfg: &SimulationConfig, grid: &[f64]) -> Result<Vec<ThroughputResult>, SimError> {
    check_grid(grid)?;
    if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(SimError::Config(format!("pi = {bad} is outside [0, 1]")));
    }
    let mut out = Vec::new();
    for &pi in grid {
        let point = SimulationConfig { pi, ..cfg.clone() };
        out.extend(run_axis(&point, SweepAxis::Pi, pi)?);
    }
    Ok(network_major(out))
}

/// Sum-throughput against antennas per AP with `L` fixed; the cellular site
/// gets `L·N` antennas at each point.
pub fn sweep_n(cfg: &SimulationConfig, grid: &[usize]) -> Result<Vec<ThroughputResult>, SimError> {
    check_grid(grid)?;
    let mut out = Vec::new();
    for &n in grid {
        if n == 0 {
            return Err(SimError::Config("antennas per AP must be at least 1".into()));
        }
        let point = SimulationConfig {
            antennas_per_ap: n,
            total_antennas: cfg.aps * n,
            ..cfg.clone()
        };
        out.extend(run_axis(&point, SweepAxis::N, n as f64)?);
    }
    Ok(network_major(out))
}

/// Sum-throughput against the number of APs with `M` fixed (`N = M / L`);
/// the cellular site keeps all `M` antennas.
pub fn sweep_l(cfg: &SimulationConfig, grid: &[usize]) -> Result<Vec<ThroughputResult>, SimError> {
    check_grid(grid)?;
    let m = cfg.total_antennas;
    if let Some(bad) = grid.iter().find(|&&l| l == 0 || !m.is_multiple_of(l)) {
        return Err(SimError::Config(format!("L = {bad} does not divide M = {m}")));
    }
    let mut out = Vec::new();
    for &l in grid {
        let point = SimulationConfig {
            aps: l,
            antennas_per_ap: m / l,
            ..cfg.clone()
        };
        out.extend(run_axis(&point, SweepAxis::L, l as f64)?);
    }
    Ok(network_major(out))
}
