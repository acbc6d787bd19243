//! Minimal standalone SVG line charts of summary tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::report::{Stat, SummaryRow};
use super::SchedulerKind;
use crate::error::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

/// One chart per summary metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Makespan,
    DiPaper,
    DiConventional,
    Cost,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Makespan, Metric::DiPaper, Metric::DiConventional, Metric::Cost];

    pub fn file_name(self) -> &'static str {
        match self {
            Metric::Makespan => "makespan.svg",
            Metric::DiPaper => "di_paper.svg",
            Metric::DiConventional => "di_conventional.svg",
            Metric::Cost => "cost.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Metric::Makespan => "Average makespan",
            Metric::DiPaper => "Average degree of imbalance, (Tmax + Tmin) / Tavg",
            Metric::DiConventional => "Average degree of imbalance, (Tmax - Tmin) / Tavg",
            Metric::Cost => "Average execution cost",
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            Metric::Makespan => "makespan (s)",
            Metric::DiPaper | Metric::DiConventional => "DI",
            Metric::Cost => "cost units",
        }
    }

    fn pick(self, row: &SummaryRow) -> Stat {
        match self {
            Metric::Makespan => row.makespan,
            Metric::DiPaper => row.di_paper,
            Metric::DiConventional => row.di_conventional,
            Metric::Cost => row.cost,
        }
    }
}

/// Smallest "nice" step (1, 2 or 5 times a power of ten) giving at most
/// `target` intervals over `span`.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let pow = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * pow)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * pow)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    format!("{v:.decimals$}")
}

/// Renders one metric as an SVG document.
pub fn render_svg(summary: &[SummaryRow], metric: Metric) -> String {
    let mut series: BTreeMap<SchedulerKind, Vec<(f64, f64)>> = BTreeMap::new();
    for row in summary {
        series
            .entry(row.scheduler)
            .or_default()
            .push((row.n_jobs as f64, metric.pick(row).mean));
    }
    let xs = series.values().flatten().map(|p| p.0);
    let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x_min, x_max) = if x_min.is_finite() {
        if x_min == x_max { (x_min - 1.0, x_max + 1.0) } else { (x_min, x_max) }
    } else {
        (0.0, 1.0)
    };
    let y_top = series.values().flatten().map(|p| p.1).fold(0.0, f64::max);
    let y_step = nice_step(if y_top > 0.0 { y_top } else { 1.0 }, 5.0);
    let y_max = (y_top / y_step).ceil().max(1.0) * y_step;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        metric.title()
    );

    // y grid and ticks
    let mut k = 0;
    loop {
        let v = k as f64 * y_step;
        if v > y_max + y_step * 1e-9 {
            break;
        }
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v, y_step)
        );
        k += 1;
    }
    // x ticks at every distinct job count
    let mut x_ticks: Vec<f64> = series.values().flatten().map(|p| p.0).collect();
    x_ticks.sort_by(f64::total_cmp);
    x_ticks.dedup();
    for x in x_ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            sx(x),
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">number of jobs</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.y_label()
    );

    for (i, (kind, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            kind.name()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes one SVG per metric into `dir` and returns the written paths.
pub fn emit_charts(summary: &[SummaryRow], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Metric::ALL
        .iter()
        .map(|&m| {
            let path = dir.join(m.file_name());
            fs::write(&path, render_svg(summary, m)).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
