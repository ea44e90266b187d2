//! Acceptance suite. Every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line; the test fails if any criterion fails.
//!
//! Run with `cargo test -p cellfree-aloha --test acceptance -- --nocapture`.

use std::fs;
use std::process::Command;

use cellfree_aloha::core::channel::{assemble_channel, sample_cn, sample_small_scale, ChannelRealization};
use cellfree_aloha::core::clustering::{full_clusters, nearest_ap_clusters, strongest_ap_clusters, ClusterAssignment};
use cellfree_aloha::core::detection::{
    mmse_combiner, mmse_sinr, restricted_mmse_sinr, sinr_from_combiner, smallcell_sinr, ReceiverConfig, ReceiverMode,
};
use cellfree_aloha::core::topology::{dbm_to_watts, large_scale_matrix, Area, LargeScaleMatrix, Layout, PathLossModel};
use cellfree_aloha::core::traffic::{sample_activity, SlotActivity};
use cellfree_aloha::core::Complex64;
use cellfree_aloha::harness::pooled_stderr;
use cellfree_aloha::output::emit_csv;
use cellfree_aloha::{run_networks, sweep_l, sweep_n, sweep_pi, SimulationConfig, ThroughputResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 1000;
const MC_TRIALS: u64 = 2000;

type Criterion = (&'static str, fn() -> Outcome);
type Sweep<'a> = (&'static str, Box<dyn Fn() -> Vec<ThroughputResult> + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// One random detection problem: `K_a ≤ 20` users, `L·N ≤ 64` antennas.
struct Instance {
    ch: ChannelRealization,
    act: SlotActivity,
    cfg: ReceiverConfig,
    full: ClusterAssignment,
    nearest: ClusterAssignment,
    /// Strongest AP by path loss, which always lies in the nearest cluster.
    serving: ClusterAssignment,
}

/// Even instances use the reference geometry and powers; odd ones use unit
/// path loss with randomly scaled powers.
fn instance(rng: &mut ChaCha8Rng, index: usize) -> Instance {
    let aps = rng.random_range(1..=16usize);
    let n = rng.random_range(1..=64 / aps);
    let k_a = rng.random_range(1..=20usize);
    let area = Area::new(1000.0, true).unwrap();
    let layout = Layout::random(aps, n, k_a, area, rng).unwrap();
    let geometric = large_scale_matrix(&layout, &PathLossModel::default()).unwrap();
    let serving = strongest_ap_clusters(&geometric, n).unwrap();
    let (beta, cfg) = if index.is_multiple_of(2) {
        let beta = geometric;
        let cfg = ReceiverConfig::uniform(ReceiverMode::CellFreeFull, dbm_to_watts(-109.0), 0.1, k_a, 2.0).unwrap();
        (beta, cfg)
    } else {
        let beta = LargeScaleMatrix::filled(k_a, aps, 1.0);
        let powers = (0..k_a).map(|_| 10f64.powf(rng.random_range(-1.0..2.0))).collect();
        let cfg = ReceiverConfig::new(ReceiverMode::CellFreeFull, rng.random_range(0.05..2.0), powers, 2.0).unwrap();
        (beta, cfg)
    };
    let h = sample_small_scale(k_a, aps, n, rng);
    let ch = assemble_channel(&beta, h).unwrap();
    let act = SlotActivity::from_users((0..k_a).collect());
    let full = full_clusters(aps, k_a, n).unwrap();
    let nearest = nearest_ap_clusters(&layout, aps.min(4)).unwrap();
    Instance {
        ch,
        act,
        cfg,
        full,
        nearest,
        serving,
    }
}

fn instances(seed: u64) -> impl Iterator<Item = Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..INSTANCES).map(move |i| instance(&mut rng, i))
}

fn formula_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for inst in instances(101) {
        for mode in [ReceiverMode::CellFreeFull, ReceiverMode::UserCentric] {
            let cfg = inst.cfg.clone().with_mode(mode);
            let assignment = if mode == ReceiverMode::CellFreeFull { &inst.full } else { &inst.nearest };
            for &k in inst.act.active() {
                let direct = mmse_sinr(&inst.ch, &inst.act, assignment, &cfg, k).unwrap();
                let v = mmse_combiner(&inst.ch, &inst.act, assignment, &cfg, k).unwrap();
                let via = sinr_from_combiner(&v, &inst.ch, &inst.act, assignment, &cfg, k).unwrap();
                worst = worst.max((via - direct).abs() / direct);
                checked += 1;
            }
        }
    }
    outcome(
        worst < 1e-8,
        format!("{INSTANCES} instances, {checked} user SINRs, worst relative error {worst:.3e} (limit 1e-8)"),
    )
}

fn mmse_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = f64::NEG_INFINITY;
    let mut combiners = 0usize;
    for (i, inst) in instances(201).enumerate() {
        let (mode, assignment) = if i % 2 == 0 {
            (ReceiverMode::CellFreeFull, &inst.full)
        } else {
            (ReceiverMode::UserCentric, &inst.nearest)
        };
        let cfg = inst.cfg.clone().with_mode(mode);
        let k = inst.act.active()[rng.random_range(0..inst.act.k_a())];
        let best = mmse_sinr(&inst.ch, &inst.act, assignment, &cfg, k).unwrap();
        let mut candidates = vec![inst.ch.user_vector(k).to_vec()];
        candidates.extend((0..100).map(|_| (0..inst.ch.dim()).map(|_| sample_cn(&mut rng)).collect::<Vec<Complex64>>()));
        for v in &candidates {
            let s = sinr_from_combiner(v, &inst.ch, &inst.act, assignment, &cfg, k).unwrap();
            worst = worst.max(s - best - 1e-9 * best.max(1.0));
            combiners += 1;
        }
    }
    outcome(
        worst <= 0.0,
        format!("{INSTANCES} instances, {combiners} combiners (maximum-ratio + 100 random each), max excess over MMSE {worst:.3e} (slack 1e-9)"),
    )
}

fn mask_dominance() -> Outcome {
    let mut violations = 0;
    let mut users = 0;
    for inst in instances(301) {
        let full_cfg = inst.cfg.clone().with_mode(ReceiverMode::CellFreeFull);
        let uc_cfg = inst.cfg.clone().with_mode(ReceiverMode::UserCentric);
        let sc_cfg = inst.cfg.clone().with_mode(ReceiverMode::SmallCell);
        for &k in inst.act.active() {
            let full = mmse_sinr(&inst.ch, &inst.act, &inst.full, &full_cfg, k).unwrap();
            let uc = mmse_sinr(&inst.ch, &inst.act, &inst.nearest, &uc_cfg, k).unwrap();
            let g = inst.ch.user_vector(k);
            let best_antenna = inst
                .nearest
                .antenna_indices(k)
                .into_iter()
                .max_by(|&a, &b| g[a].norm_sqr().total_cmp(&g[b].norm_sqr()))
                .unwrap();
            let single = restricted_mmse_sinr(&inst.ch, &inst.act, &uc_cfg, k, &[best_antenna]).unwrap();
            let small = smallcell_sinr(&inst.ch, &inst.act, &inst.serving, &sc_cfg, k).unwrap();
            let slack = |x: f64| 1e-9 * x.max(1.0);
            if full + slack(full) < uc || uc + slack(uc) < single || uc + slack(uc) < small {
                violations += 1;
            }
            users += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{INSTANCES} instances, {users} users: full >= user-centric >= best single antenna / serving AP, {violations} violations (slack 1e-9)"),
    )
}

fn reference(pi: f64) -> SimulationConfig {
    SimulationConfig {
        pi,
        trials: MC_TRIALS,
        ..SimulationConfig::default()
    }
}

fn find(results: &[ThroughputResult], mode: ReceiverMode) -> &ThroughputResult {
    results.iter().find(|r| r.network == mode).unwrap()
}

/// `(a − b) / pooled SE`.
fn z(a: &ThroughputResult, b: &ThroughputResult) -> f64 {
    (a.mean_bps - b.mean_bps) / pooled_stderr(a, b)
}

fn mbps(r: &ThroughputResult) -> String {
    format!("{:.2}±{:.2}", r.mean_bps / 1e6, r.stderr_bps / 1e6)
}

fn unimodal_pi() -> Outcome {
    let mut grid = vec![0.02];
    grid.extend((1..=20).map(|i| (i as f64 * 5.0).round() / 100.0));
    let cfg = SimulationConfig {
        networks: vec![ReceiverMode::CellFreeFull],
        ..reference(0.1)
    };
    let results = sweep_pi(&cfg, &grid).unwrap();
    let peak = results.iter().max_by(|a, b| a.mean_bps.total_cmp(&b.mean_bps)).unwrap();
    let first = &results[0];
    let last = results.last().unwrap();
    let (z_first, z_last) = (z(peak, first), z(peak, last));
    outcome(
        z_first >= 3.0 && z_last >= 3.0,
        format!(
            "full cell-free peak {} Mbit/s at pi={}; pi=0.02 {} ({z_first:.1} SE below), pi=1.0 {} ({z_last:.1} SE below); need >= 3 SE",
            mbps(peak),
            peak.pi,
            mbps(first),
            mbps(last)
        ),
    )
}

fn low_pi_ordering() -> Outcome {
    let results = run_networks(&reference(0.1)).unwrap();
    let full = find(&results, ReceiverMode::CellFreeFull);
    let uc = find(&results, ReceiverMode::UserCentric);
    let cell = find(&results, ReceiverMode::CellularMimo);
    let small = find(&results, ReceiverMode::SmallCell);
    let gap = (full.mean_bps - uc.mean_bps) / full.mean_bps;
    let checks = [
        full.mean_bps >= uc.mean_bps,
        z(uc, small) >= 2.0,
        z(uc, cell) >= 2.0,
        gap <= 0.15,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "pi=0.1 Mbit/s: full {}, user-centric {}, cellular {}, small-cell {}; full>=UC {}; UC-small {:.1} SE, UC-cellular {:.1} SE (need >= 2); full-vs-UC gap {:.1}% (need <= 15%)",
            mbps(full),
            mbps(uc),
            mbps(cell),
            mbps(small),
            checks[0],
            z(uc, small),
            z(uc, cell),
            100.0 * gap
        ),
    )
}

fn high_pi_ordering() -> Outcome {
    let results = run_networks(&reference(0.6)).unwrap();
    let small = find(&results, ReceiverMode::SmallCell);
    let mut pass = true;
    let mut parts = vec![format!("small-cell {}", mbps(small))];
    for r in results.iter().filter(|r| r.network != ReceiverMode::SmallCell) {
        let zz = z(small, r);
        pass &= zz >= 2.0;
        parts.push(format!("{} {} (small-cell lead {zz:.1} SE)", r.network, mbps(r)));
    }
    outcome(pass, format!("pi=0.6 Mbit/s: {}; need lead >= 2 SE over each", parts.join(", ")))
}

fn l_trends() -> Outcome {
    let grid = [1, 2, 4, 8, 16, 32, 64];
    let cfg = SimulationConfig {
        networks: vec![ReceiverMode::CellFreeFull, ReceiverMode::UserCentric, ReceiverMode::SmallCell],
        ..reference(0.1)
    };
    let results = sweep_l(&cfg, &grid).unwrap();
    let series = |mode| results.iter().filter(|r| r.network == mode).collect::<Vec<_>>();
    let mut pass = true;
    let mut parts = Vec::new();
    for mode in [ReceiverMode::CellFreeFull, ReceiverMode::UserCentric] {
        let s = series(mode);
        let worst = s.windows(2).map(|w| z(w[1], w[0])).fold(f64::INFINITY, f64::min);
        pass &= worst >= -1.0;
        let means: Vec<String> = s.iter().map(|r| format!("{:.1}", r.mean_bps / 1e6)).collect();
        parts.push(format!("{mode} [{}] worst step {worst:.1} SE (need >= -1)", means.join(", ")));
    }
    let s = series(ReceiverMode::SmallCell);
    let peak = s.iter().max_by(|a, b| a.mean_bps.total_cmp(&b.mean_bps)).unwrap();
    let drop = z(peak, s.last().unwrap());
    pass &= drop >= 2.0;
    let means: Vec<String> = s.iter().map(|r| format!("{:.1}", r.mean_bps / 1e6)).collect();
    parts.push(format!(
        "small-cell [{}] peak at L={}, L=64 below peak by {drop:.1} SE (need >= 2)",
        means.join(", "),
        peak.aps
    ));
    outcome(pass, format!("pi=0.1, M=64, L in {grid:?}, Mbit/s: {}", parts.join("; ")))
}

fn traffic_statistics() -> Outcome {
    const SLOTS: usize = 10_000;
    let (k, pi) = (200usize, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let counts: Vec<f64> = (0..SLOTS)
        .map(|_| sample_activity(k, pi, &mut rng).unwrap().k_a() as f64)
        .collect();
    let n = SLOTS as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);

    let mu = k as f64 * pi;
    let sigma2 = mu * (1.0 - pi);
    // Central fourth moment of Bin(K, π).
    let mu4 = sigma2 * (1.0 + 3.0 * (k as f64 - 2.0) * pi * (1.0 - pi));
    let se_mean = (sigma2 / n).sqrt();
    let se_var = ((mu4 - sigma2 * sigma2 * (n - 3.0) / (n - 1.0)) / n).sqrt();
    let (z_mean, z_var) = ((mean - mu) / se_mean, (var - sigma2) / se_var);
    outcome(
        z_mean.abs() <= 3.0 && z_var.abs() <= 3.0,
        format!(
            "{SLOTS} slots at K={k}, pi={pi}: mean K_a {mean:.4} vs {mu} ({z_mean:+.2} SE, SE {se_mean:.4}); variance {var:.3} vs {sigma2} ({z_var:+.2} SE, SE {se_var:.3}); need |z| <= 3"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let base = SimulationConfig {
        trials: 60,
        seed: 99,
        ..SimulationConfig::default()
    };
    let runs: [Sweep; 3] = [
        ("sweep-pi", Box::new(|| sweep_pi(&base, &[0.05, 0.3, 0.6]).unwrap())),
        ("sweep-n", Box::new(|| sweep_n(&base, &[1, 2, 4]).unwrap())),
        ("sweep-l", Box::new(|| sweep_l(&base, &[1, 4, 16, 64]).unwrap())),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in &runs {
        let a = dir.path().join(format!("{name}-a.csv"));
        let b = dir.path().join(format!("{name}-b.csv"));
        emit_csv(&run(), &a).unwrap();
        emit_csv(&run(), &b).unwrap();
        let same = fs::read(&a).unwrap() == fs::read(&b).unwrap();
        pass &= same;
        parts.push(format!("{name} {}", if same { "identical" } else { "DIFFERS" }));
    }

    let exe = env!("CARGO_BIN_EXE_cellfree-aloha");
    let cli = |out: &std::path::Path| {
        let status = Command::new(exe)
            .args(["sweep-pi", "--grid", "0.1,0.5", "--trials", "40", "--seed", "7", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out).unwrap()
    };
    let same = cli(&dir.path().join("cli-a.csv")) == cli(&dir.path().join("cli-b.csv"));
    pass &= same;
    parts.push(format!("CLI sweep-pi {}", if same { "identical" } else { "DIFFERS" }));
    outcome(pass, format!("byte comparison of re-run CSVs: {}", parts.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("formula equivalence", formula_equivalence),
        ("MMSE optimality", mmse_optimality),
        ("mask dominance", mask_dominance),
        ("unimodal throughput over pi", unimodal_pi),
        ("low-pi ordering", low_pi_ordering),
        ("high-pi ordering", high_pi_ordering),
        ("trends over L", l_trends),
        ("traffic statistics", traffic_statistics),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("[{}] criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
