//! CSV and SVG writers for sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cellfree_aloha_core::detection::ReceiverMode;

use crate::harness::ThroughputResult;
use crate::SimError;

pub const CSV_HEADER: &str =
    "network,sweep_axis,axis_value,L,N,K,pi,trials,seed,mean_throughput_bps,stderr_bps";

/// Renders results as CSV text, header first, every row newline-terminated.
pub fn to_csv(results: &[ThroughputResult]) -> Result<String, SimError> {
    if results.is_empty() {
        return Err(SimError::EmptyResults);
    }
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.network,
            r.sweep_axis,
            r.axis_value,
            r.aps,
            r.antennas_per_ap,
            r.users,
            r.pi,
            r.trials,
            r.seed,
            r.mean_bps,
            r.stderr_bps
        )
        .expect("writing to a String");
    }
    Ok(out)
}

/// Writes the CSV to `path`. Nothing is created when `results` is empty.
pub fn emit_csv(results: &[ThroughputResult], path: &Path) -> Result<(), SimError> {
    let text = to_csv(results)?;
    fs::write(path, text)?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_Y: f64 = 40.0;

fn color(mode: ReceiverMode) -> &'static str {
    match mode {
        ReceiverMode::CellFreeFull => "#1f77b4",
        ReceiverMode::UserCentric => "#d62728",
        ReceiverMode::CellularMimo => "#2ca02c",
        ReceiverMode::SmallCell => "#ff7f0e",
    }
}

/// Line chart of mean throughput (Mbit/s) against the sweep value, one series
/// per network, with ±1 standard-error bars.
pub fn to_svg(results: &[ThroughputResult], title: &str) -> Result<String, SimError> {
    if results.is_empty() {
        return Err(SimError::EmptyResults);
    }
    let axis = results[0].sweep_axis;
    let (x_min, x_max) = results
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.axis_value), hi.max(r.axis_value)));
    let y_max = results
        .iter()
        .map(|r| (r.mean_bps + r.stderr_bps) / 1e6)
        .fold(0.0, f64::max)
        .max(1e-9)
        * 1.05;
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + (x - x_min) / x_span * plot_w;
    let py = |y: f64| HEIGHT - MARGIN_Y - y / y_max * plot_h;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(w, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        w,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" stroke="black" fill="none"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_Y,
        b = HEIGHT - MARGIN_Y,
        r = WIDTH - MARGIN_RIGHT
    );
    for i in 0..=4 {
        let y = y_max * i as f64 / 4.0;
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.2}</text>"#,
            MARGIN_LEFT - 6.0,
            py(y) + 4.0,
            y
        );
        let x = x_min + x_span * i as f64 / 4.0;
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            HEIGHT - MARGIN_Y + 16.0,
            trim(x)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 6.0,
        axis.name()
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">sum-throughput (Mbit/s)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let mut networks: Vec<ReceiverMode> = results.iter().map(|r| r.network).collect();
    networks.sort();
    networks.dedup();
    for (row, &mode) in networks.iter().enumerate() {
        let mut series: Vec<&ThroughputResult> = results.iter().filter(|r| r.network == mode).collect();
        series.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));
        let c = color(mode);
        let points: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.axis_value), py(r.mean_bps / 1e6)))
            .collect();
        let _ = writeln!(w, r#"<polyline points="{}" stroke="{c}" fill="none" stroke-width="1.5"/>"#, points.join(" "));
        for r in &series {
            let (x, m, e) = (px(r.axis_value), r.mean_bps / 1e6, r.stderr_bps / 1e6);
            let _ = writeln!(
                w,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/><circle cx="{x:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#,
                py(m - e),
                py(m + e),
                py(m)
            );
        }
        let ly = MARGIN_Y + 16.0 + 18.0 * row as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/><text x="{}" y="{}">{mode}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(results: &[ThroughputResult], title: &str, path: &Path) -> Result<(), SimError> {
    let text = to_svg(results, title)?;
    fs::write(path, text)?;
    Ok(())
}

fn trim(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
