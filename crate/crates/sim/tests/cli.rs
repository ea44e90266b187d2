use std::fs;
use std::process::{Command, Output};

use cellfree_aloha::harness::trial_activity;
use cellfree_aloha::output::CSV_HEADER;
use cellfree_aloha::{sweep_pi, SimulationConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellfree-aloha")).args(args).output().unwrap()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn point_prints_selected_networks() {
    let r = rows(&run(&["point", "--network", "small-cell,user-centric", "--trials", "20", "--pi", "0.2"]));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][0], "user-centric");
    assert_eq!(r[1][0], "small-cell");
    for row in &r {
        assert_eq!(row.len(), 11);
        assert_eq!(&row[1..9], ["point", "0.2", "16", "4", "200", "0.2", "20", "1"]);
        assert!(row[9].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn default_pi_grid_has_twenty_points_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("pi.svg");
    let r = rows(&run(&["sweep-pi", "--network", "cell-free-full", "--trials", "2", "--svg", svg.to_str().unwrap()]));
    assert_eq!(r.len(), 20);
    assert_eq!(r[0][2], "0.05");
    assert_eq!(r[19][2], "1");
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn sweep_n_scales_the_cellular_site() {
    let r = rows(&run(&["sweep-n", "--grid", "1,2,4,8", "--trials", "3", "--network", "cellular-mimo,small-cell"]));
    assert_eq!(r.len(), 8);
    let cellular: Vec<_> = r.iter().filter(|row| row[0] == "cellular-mimo").collect();
    let sizes: Vec<(&str, &str)> = cellular.iter().map(|row| (row[3].as_str(), row[4].as_str())).collect();
    assert_eq!(sizes, [("1", "16"), ("1", "32"), ("1", "64"), ("1", "128")]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "pi = 0.3\ntrials = 4\naps = 8\nantennas_per_ap = 8\nnetworks = [\"cell-free-full\"]\n").unwrap();
    let out = dir.path().join("run.csv");
    let status = run(&["point", "--config", cfg.to_str().unwrap(), "--pi", "0.05", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..8], ["cell-free-full", "point", "0.05", "8", "8", "200", "0.05", "4"]);
}

#[test]
fn invalid_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "unknown_key = 1\n").unwrap();
    for args in [
        vec!["sweep-l", "--grid", "3", "--trials", "1"],
        vec!["point", "--network", "macro-cell"],
        vec!["point", "--pi", "1.5"],
        vec!["point", "--config", bad.to_str().unwrap()],
        vec!["point", "--config", "/nonexistent/cfg.toml"],
        vec!["point", "--trials", "1", "--out", "/nonexistent/dir/out.csv"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn zero_activity_gives_zero_curve() {
    let cfg = SimulationConfig {
        trials: 5,
        ..SimulationConfig::default()
    };
    let results = sweep_pi(&cfg, &[0.0]).unwrap();
    assert_eq!(results.len(), 4);
    assert!(results.iter().all(|r| r.mean_bps == 0.0 && r.stderr_bps == 0.0));
}

#[test]
fn activity_is_coupled_along_the_pi_grid() {
    let grid = [0.0, 0.05, 0.1, 0.3, 0.6, 1.0];
    let trials = 200;
    let mut previous_mean = -1.0;
    let mut previous: Vec<Vec<usize>> = vec![Vec::new(); trials];
    for &pi in &grid {
        let sc = SimulationConfig {
            pi,
            ..SimulationConfig::default()
        }
        .resolve()
        .unwrap();
        let mut total = 0usize;
        for (t, prev) in previous.iter_mut().enumerate() {
            let act = trial_activity(&sc, t as u64).unwrap();
            assert!(prev.iter().all(|k| act.is_active(*k)));
            total += act.k_a();
            *prev = act.active().to_vec();
        }
        let mean = total as f64 / trials as f64;
        assert!(mean >= previous_mean);
        previous_mean = mean;
    }
    assert_eq!(previous_mean, 200.0);
}
