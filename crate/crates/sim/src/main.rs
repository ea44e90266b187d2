use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use cellfree_aloha::core::detection::ReceiverMode;
use cellfree_aloha::core::metrics::Prefactor;
use cellfree_aloha::output::{emit_csv, emit_svg, to_csv};
use cellfree_aloha::{harness, SimulationConfig, ThroughputResult};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cellfree-aloha", version, about = "Slotted ALOHA sum-throughput over cell-free, user-centric, cellular and small-cell uplinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the selected networks at one operating point.
    Point(Common),
    /// Sweep the activation probability.
    SweepPi {
        /// Comma-separated probabilities [default: 0.05,0.10,...,1.00]
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep antennas per AP with the number of APs fixed.
    SweepN {
        /// Comma-separated antenna counts [default: 1,2,4,8,16]
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the number of APs with the total antenna count fixed.
    SweepL {
        /// Comma-separated AP counts, each dividing the total [default: 1,2,4,8,16,32,64]
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PrefactorArg {
    #[value(name = "2B")]
    TwoB,
    #[value(name = "B")]
    B,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with configuration keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Networks to evaluate (repeat or comma-separate) [default: all]
    #[arg(long, value_delimiter = ',', value_parser = parse_network)]
    network: Vec<ReceiverMode>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Activation probability (ignored by sweep-pi).
    #[arg(long)]
    pi: Option<f64>,
    /// Number of distributed APs.
    #[arg(long)]
    aps: Option<usize>,
    /// Antennas per distributed AP.
    #[arg(long)]
    antennas_per_ap: Option<usize>,
    /// Keep one layout for every trial.
    #[arg(long)]
    fixed_layout: bool,
    #[arg(long, value_enum)]
    throughput_prefactor: Option<PrefactorArg>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also draw the results as an SVG line chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn parse_network(s: &str) -> Result<ReceiverMode, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ReceiverMode::ALL.iter().map(|m| m.name()).collect();
        format!("unknown network `{s}`; expected one of {}", names.join(", "))
    })
}

impl Common {
    fn build_config(&self) -> anyhow::Result<SimulationConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimulationConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => SimulationConfig::default(),
        };
        if !self.network.is_empty() {
            cfg.networks = self.network.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.pi {
            cfg.pi = p;
        }
        if let Some(l) = self.aps {
            cfg.aps = l;
        }
        if let Some(n) = self.antennas_per_ap {
            cfg.antennas_per_ap = n;
        }
        if self.aps.is_some() || self.antennas_per_ap.is_some() {
            cfg.total_antennas = cfg.aps * cfg.antennas_per_ap;
        }
        if self.fixed_layout {
            cfg.fixed_layout = true;
        }
        if let Some(p) = self.throughput_prefactor {
            cfg.throughput_prefactor = match p {
                PrefactorArg::TwoB => Prefactor::TwoB,
                PrefactorArg::B => Prefactor::B,
            };
        }
        Ok(cfg)
    }

    fn write(&self, results: &[ThroughputResult], title: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => emit_csv(results, path).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(to_csv(results)?.as_bytes())?,
        }
        if let Some(path) = &self.svg {
            emit_svg(results, title, path).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn or_default<T: Clone>(grid: &[T], default: &[T]) -> Vec<T> {
    if grid.is_empty() {
        default.to_vec()
    } else {
        grid.to_vec()
    }
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Point(common) => {
            let cfg = common.build_config()?;
            let results = harness::run_networks(&cfg)?;
            common.write(&results, &format!("pi = {}", cfg.pi))?;
        }
        Command::SweepPi { grid, common } => {
            let cfg = common.build_config()?;
            let default: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).map(|p| (p * 100.0).round() / 100.0).collect();
            let results = harness::sweep_pi(&cfg, &or_default(&grid, &default))?;
            common.write(&results, &format!("L = {}, N = {}", cfg.aps, cfg.antennas_per_ap))?;
        }
        Command::SweepN { grid, common } => {
            let cfg = common.build_config()?;
            let results = harness::sweep_n(&cfg, &or_default(&grid, &[1, 2, 4, 8, 16]))?;
            common.write(&results, &format!("pi = {}, L = {}", cfg.pi, cfg.aps))?;
        }
        Command::SweepL { grid, common } => {
            let cfg = common.build_config()?;
            let results = harness::sweep_l(&cfg, &or_default(&grid, &[1, 2, 4, 8, 16, 32, 64]))?;
            common.write(&results, &format!("pi = {}, M = {}", cfg.pi, cfg.total_antennas))?;
        }
    }
    Ok(())
}
