//! Deterministic SVG line plots from CSV columns.

use std::fmt::Write as _;
use std::path::Path;

use super::Table;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: Vec<String>,
    pub filter: Option<(String, String)>,
    pub title: String,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Reads `csv_path` and writes an SVG with one polyline per `y` column.
/// Cells that are empty or not numbers are skipped. No file is written
/// when there is nothing to draw.
pub fn emit_plot(csv_path: &Path, spec: &PlotSpec, out_path: &Path) -> Result<()> {
    let table = Table::read(csv_path)?;
    let svg = render(&table, spec)?;
    std::fs::write(out_path, svg)?;
    Ok(())
}

pub fn render(table: &Table, spec: &PlotSpec) -> Result<String> {
    let x_col = table.column(&spec.x)?;
    let y_cols = spec.y.iter().map(|c| table.column(c)).collect::<Result<Vec<_>>>()?;
    let filter = match &spec.filter {
        Some((col, value)) => Some((table.column(col)?, value.as_str())),
        None => None,
    };
    let rows: Vec<&Vec<String>> = table
        .rows
        .iter()
        .filter(|r| filter.is_none_or(|(c, v)| r[c] == v))
        .collect();
    let series: Vec<Vec<(f64, f64)>> = y_cols
        .iter()
        .map(|&yc| {
            rows.iter()
                .filter_map(|r| Some((r[x_col].parse::<f64>().ok()?, r[yc].parse::<f64>().ok()?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    let points: Vec<(f64, f64)> = series.iter().flatten().copied().collect();
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    let (x_lo, x_hi) = padded_range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(points.iter().map(|p| p.1));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(&spec.title));
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let (px, py) = (sx(fx), sy(fy));
        let _ = writeln!(svg, r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#ccc"/>"##, TOP, TOP + plot_h);
        let _ = writeln!(svg, r##"<line x1="{LEFT:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ccc"/>"##, LEFT + plot_w);
        let _ = writeln!(svg, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + plot_h + 16.0, tick(fx));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py + 4.0, tick(fy));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(&spec.x)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&spec.y.join(", "))
    );
    for (k, (name, pts)) in spec.y.iter().zip(&series).enumerate() {
        let color = COLORS[k % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        let pad = if lo.abs() < 1e-12 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(y: &[&str]) -> PlotSpec {
        PlotSpec { x: "t".into(), y: y.iter().map(|s| s.to_string()).collect(), filter: None, title: "demo".into() }
    }

    #[test]
    fn two_columns_make_one_polyline() {
        let mut t = Table::new(&["t", "m"]);
        for i in 0..4 {
            t.push(vec![i.to_string(), (i * i).to_string()]);
        }
        let svg = render(&t, &spec(&["m"])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(">t</text>") && svg.contains(">m</text>"));
        assert_eq!(svg, render(&t, &spec(&["m"])).unwrap());
    }

    #[test]
    fn errors() {
        let t = Table::new(&["t", "m"]);
        assert!(matches!(render(&t, &spec(&["m"])), Err(Error::EmptyData)));
        assert!(matches!(render(&t, &spec(&["nope"])), Err(Error::UnknownColumn(_))));
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        t.write(&csv).unwrap();
        let out = dir.path().join("plot.svg");
        assert!(emit_plot(&csv, &spec(&["m"]), &out).is_err());
        assert!(!out.exists());
    }
}
