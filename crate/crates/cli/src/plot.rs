//! Line charts for metric CSVs, emitted as standalone SVG text.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

pub(crate) struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Resolves a column request to an index, defaulting by position.
    pub fn column(
        &self,
        requested: Option<&str>,
        default_index: usize,
        path: &str,
    ) -> Result<usize> {
        match requested {
            Some(name) => self
                .columns
                .iter()
                .position(|c| c == name)
                .with_context(|| {
                    format!(
                        "{path}: no column {name:?} (columns: {})",
                        self.columns.join(", ")
                    )
                }),
            None => {
                if default_index >= self.columns.len() {
                    bail!(
                        "{path}: needs at least {} columns, found {}",
                        default_index + 1,
                        self.columns.len()
                    );
                }
                Ok(default_index)
            }
        }
    }
}

/// Reads a metric CSV: `#` comments are skipped, the first remaining line
/// names the columns, and every cell must be numeric.
pub(crate) fn read_table(path: &str) -> Result<Table> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin().lock())?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("open {path}"))?
    };
    let name = if path == "-" {
        "stdin".to_string()
    } else {
        Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.to_string())
    };
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.parse::<f64>()
                    .with_context(|| format!("{path}:{}: bad number {cell:?}", index + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != columns.len() {
            bail!(
                "{path}:{}: expected {} cells, got {}",
                index + 1,
                columns.len(),
                row.len()
            );
        }
        rows.push(row);
    }
    if columns.is_empty() {
        bail!("{path}: no header line");
    }
    Ok(Table {
        name,
        columns,
        rows,
    })
}

pub(crate) struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub(crate) struct ChartOptions {
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
    pub x_label: String,
    pub y_label: String,
}

fn xml_escape(raw: &str) -> String {
    raw.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn nice_step(range: f64, target: f64) -> f64 {
    let raw = range / target;
    let magnitude = 10f64.powf(raw.log10().floor());
    for multiple in [1.0, 2.0, 5.0] {
        if multiple * magnitude >= raw {
            return multiple * magnitude;
        }
    }
    10.0 * magnitude
}

fn decimals_for(step: f64) -> usize {
    for d in 0..=9u32 {
        let scaled = step * 10f64.powi(d as i32);
        if (scaled - scaled.round()).abs() < 1e-9 * scaled.abs().max(1.0) {
            return d as usize;
        }
    }
    9
}

fn ticks(min: f64, max: f64) -> (Vec<f64>, usize) {
    let step = nice_step(max - min, 6.0);
    let mut values = Vec::new();
    let mut v = (min / step).ceil() * step;
    while v <= max + step * 1e-9 {
        values.push(if v.abs() < step * 1e-9 { 0.0 } else { v });
        v += step;
    }
    (values, decimals_for(step))
}

fn padded(mut min: f64, mut max: f64) -> (f64, f64) {
    if min == max {
        min -= 0.5;
        max += 0.5;
    }
    (min, max)
}

pub(crate) fn render(series: &[Series], opts: &ChartOptions) -> Result<String> {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if finite.is_empty() {
        bail!("no plottable points");
    }
    let (x_min, x_max) = padded(
        finite.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        finite.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let (y_min, y_max) = padded(
        finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );

    let (w, h) = (opts.width as f64, opts.height as f64);
    let top = if opts.title.is_some() { 40.0 } else { 20.0 };
    let (left, right, bottom) = (70.0, 20.0, 50.0);
    let (plot_w, plot_h) = (w - left - right, h - top - bottom);
    if plot_w < 50.0 || plot_h < 50.0 {
        bail!("chart size too small for the margins");
    }
    let sx = |v: f64| left + (v - x_min) / (x_max - x_min) * plot_w;
    let sy = |v: f64| top + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        opts.width, opts.height
    );
    if let Some(title) = &opts.title {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
            left + plot_w / 2.0,
            xml_escape(title)
        );
    }

    let (x_ticks, x_dec) = ticks(x_min, x_max);
    let (y_ticks, y_dec) = ticks(y_min, y_max);
    for &t in &x_ticks {
        let x = sx(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
            top,
            top + plot_h
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:.*}</text>",
            top + plot_h + 16.0,
            x_dec,
            t
        );
    }
    for &t in &y_ticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            left,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.*}</text>",
            left - 6.0,
            y + 4.0,
            y_dec,
            t
        );
    }
    // Axis frame on top of the grid lines.
    let _ = writeln!(
        svg,
        "<rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" fill=\"none\" stroke=\"#333333\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        left + plot_w / 2.0,
        h - 12.0,
        xml_escape(&opts.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        xml_escape(&opts.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() == 1 {
            let (x, y) = s.points[0];
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            );
            continue;
        }
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.join(" ")
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = top + 14.0 + i as f64 * 16.0;
        let x = left + plot_w - 150.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            y - 4.0,
            x + 18.0,
            y - 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            x + 24.0,
            xml_escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
