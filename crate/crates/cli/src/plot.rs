//! Metric-vs-SNR line charts with across-seed error bars, written as SVG.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cosc_core::report::{Method, MetricsReport, MetricsRow};
use cosc_core::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// One curve: mean and spread per SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn collect(
    report: &MetricsReport,
    methods: &[Method],
    snrs: &[f64],
    metric: fn(&MetricsRow) -> Option<f64>,
) -> Vec<Series> {
    methods
        .iter()
        .filter_map(|&m| {
            let points: Vec<(f64, f64, f64)> = snrs
                .iter()
                .filter_map(|&s| {
                    let vals: Vec<f64> = report.cell(m, s).into_iter().filter_map(metric).collect();
                    (!vals.is_empty()).then(|| {
                        let (mean, std) = mean_std(&vals);
                        (s, mean, std)
                    })
                })
                .collect();
            (!points.is_empty()).then(|| Series {
                label: m.name().to_string(),
                points,
            })
        })
        .collect()
}

fn nice_range(series: &[Series], floor_zero: bool) -> (f64, f64) {
    let lo = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1 - p.2))
        .fold(f64::INFINITY, f64::min);
    let hi = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1 + p.2))
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = if floor_zero { 0.0 } else { lo };
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (if floor_zero { lo } else { lo - pad }, hi + pad)
    }
}

/// The three figures for a report; fails on an empty or incomplete grid.
pub fn figures(
    report: &MetricsReport,
    methods: &[Method],
    snrs: &[f64],
    seeds: &[u64],
) -> Result<Vec<(String, Figure)>> {
    if report.rows.is_empty() {
        return Err(Error::Plot("report is empty".into()));
    }
    let missing = report.missing_cells(methods, snrs, seeds);
    if !missing.is_empty() {
        return Err(Error::Plot(format!("missing cells: {}", missing.join(", "))));
    }
    let x_range = (
        snrs.iter().cloned().fold(f64::INFINITY, f64::min),
        snrs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let mse = collect(report, methods, snrs, |r| r.feature_mse);
    let rank1 = collect(report, methods, snrs, |r| Some(r.rank1));
    let map = collect(report, methods, snrs, |r| Some(r.map));
    let mut out = Vec::new();
    out.push((
        "feature_mse.svg".to_string(),
        Figure {
            title: "Feature recovery MSE".into(),
            y_label: "MSE".into(),
            x_range,
            y_range: nice_range(&mse, true),
            series: mse,
        },
    ));
    out.push((
        "rank1.svg".to_string(),
        Figure {
            title: "Rank-1 accuracy".into(),
            y_label: "rank-1".into(),
            x_range,
            y_range: (0.0, 1.0),
            series: rank1,
        },
    ));
    out.push((
        "map.svg".to_string(),
        Figure {
            title: "Mean average precision".into(),
            y_label: "mAP".into(),
            x_range,
            y_range: (0.0, 1.0),
            series: map,
        },
    ));
    Ok(out)
}

pub fn render_svg(fig: &Figure) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let (x0, x1) = if fig.x_range.1 > fig.x_range.0 {
        fig.x_range
    } else {
        (fig.x_range.0 - 1.0, fig.x_range.1 + 1.0)
    };
    let (y0, y1) = fig.y_range;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        fig.title
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let y = y0 + (y1 - y0) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle">{4:.1}</text>"#,
            px(x),
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0,
            MARGIN_TOP + plot_h + 20.0,
            x
        );
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="lightgray"/><text x="{3}" y="{4}" text-anchor="end">{5:.3}</text>"#,
            MARGIN_LEFT,
            py(y),
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            py(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">SNR (dB)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        fig.y_label
    );
    for (i, series) in fig.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y, _)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y, e) in &series.points {
            let (cx, top, bottom) = (px(x), py((y + e).min(y1)), py((y - e).max(y0)));
            let _ = writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{top:.2}" x2="{cx:.2}" y2="{bottom:.2}" stroke="{color}"/><line x1="{:.2}" y1="{top:.2}" x2="{:.2}" y2="{top:.2}" stroke="{color}"/><line x1="{:.2}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="{color}"/><circle cx="{cx:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                cx - 4.0,
                cx + 4.0,
                cx - 4.0,
                cx + 4.0,
                py(y)
            );
        }
        let ly = MARGIN_TOP + 12.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            series.label
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_figures(
    report: &MetricsReport,
    methods: &[Method],
    snrs: &[f64],
    seeds: &[u64],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let figs = figures(report, methods, snrs, seeds)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, fig) in figs {
        let path = dir.join(name);
        fs::write(&path, render_svg(&fig))?;
        paths.push(path);
    }
    Ok(paths)
}
