//! Deterministic SVG plots from a results directory.
//!
//! Reads `records.csv` and emits convergence curves (normalized value vs
//! side length, one line per boundary mode, with +-2 SE bands), a
//! variance-decay curve, and a boundary-gap bar chart when both modes are
//! present. Output bytes depend only on the input records.

use anyhow::{bail, Context};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug)]
struct Row {
    nu: String,
    a: u8,
    b: u8,
    t: f64,
    bc: String,
    normalized: f64,
}

fn parse_records(path: &Path) -> anyhow::Result<Vec<Row>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let cols: Vec<&str> = header.split(',').collect();
    let idx = |name: &str| -> anyhow::Result<usize> {
        cols.iter()
            .position(|c| *c == name)
            .with_context(|| format!("records.csv lacks column {name}"))
    };
    let (inx, iny) = (idx("nu_x")?, idx("nu_y")?);
    let inz = cols.iter().position(|c| *c == "nu_z");
    let (ia, ib, it, ibc, inorm) = (idx("a")?, idx("b")?, idx("t")?, idx("bc")?, idx("normalized")?);
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let nu = match inz {
            Some(z) => format!("({},{},{})", f[inx], f[iny], f[z]),
            None => format!("({},{})", f[inx], f[iny]),
        };
        rows.push(Row {
            nu,
            a: f[ia].parse()?,
            b: f[ib].parse()?,
            t: f[it].parse()?,
            bc: f[ibc].to_string(),
            normalized: f[inorm].parse()?,
        });
    }
    if rows.is_empty() {
        bail!("records.csv holds no records");
    }
    Ok(rows)
}

struct Series {
    label: String,
    /// (t, mean, two standard errors)
    points: Vec<(f64, f64, f64)>,
}

fn group_series(rows: &[Row]) -> BTreeMap<String, Vec<Series>> {
    let mut grouped: BTreeMap<String, BTreeMap<String, BTreeMap<u64, Vec<f64>>>> = BTreeMap::new();
    for row in rows {
        grouped
            .entry(format!("nu{}_{}to{}", row.nu, row.b, row.a))
            .or_default()
            .entry(row.bc.clone())
            .or_default()
            .entry(row.t.to_bits())
            .or_default()
            .push(row.normalized);
    }
    let mut out = BTreeMap::new();
    for (key, by_bc) in grouped {
        let mut series = Vec::new();
        for (bc, by_t) in by_bc {
            let mut points = Vec::new();
            for (tbits, vals) in by_t {
                let t = f64::from_bits(tbits);
                let mean = homlab_core::stats::mean(&vals);
                let se = homlab_core::stats::standard_error(&vals);
                points.push((t, mean, 2.0 * se));
            }
            points.sort_by(|p, q| p.0.total_cmp(&q.0));
            series.push(Series { label: bc, points });
        }
        out.insert(key, series);
    }
    out
}

const COLORS: [&str; 4] = ["#1f6fb2", "#c05020", "#3a9a50", "#8050a0"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y, band) in &s.points {
            xs.push(x);
            ys.push(y - band);
            ys.push(y + band);
        }
    }
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0).max(1e-12) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0).max(1e-12) * (H - 2.0 * MARGIN);
    let mut svg = svg_open(title, x_label, y_label, x0, x1, y0, y1);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if s.points.iter().any(|p| p.2 > 0.0) {
            let mut band = String::new();
            for &(x, y, b) in &s.points {
                let _ = write!(band, "{},{} ", fmt(sx(x)), fmt(sy(y + b)));
            }
            for &(x, y, b) in s.points.iter().rev() {
                let _ = write!(band, "{},{} ", fmt(sx(x)), fmt(sy(y - b)));
            }
            let _ = writeln!(
                svg,
                "<polygon points=\"{}\" fill=\"{}\" opacity=\"0.15\"/>",
                band.trim_end(),
                color
            );
        }
        let mut pts = String::new();
        for &(x, y, _) in &s.points {
            let _ = write!(pts, "{},{} ", fmt(sx(x)), fmt(sy(y)));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            pts.trim_end(),
            color
        );
        for &(x, y, _) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>",
                fmt(sx(x)),
                fmt(sy(y)),
                color
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{}\" font-size=\"13\">{}</text>",
            fmt(W - MARGIN - 120.0),
            fmt(MARGIN + 18.0 * (i as f64 + 1.0)),
            color,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let ys: Vec<f64> = bars.iter().map(|b| b.1).collect();
    let (_, y1) = bounds(&ys);
    let y0 = 0.0;
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0).max(1e-12) * (H - 2.0 * MARGIN);
    let mut svg = svg_open(title, "direction", "relative gap", 0.0, bars.len() as f64, y0, y1);
    let slot = (W - 2.0 * MARGIN) / bars.len().max(1) as f64;
    for (i, (label, v)) in bars.iter().enumerate() {
        let x = MARGIN + slot * i as f64 + slot * 0.2;
        let _ = writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            fmt(x),
            fmt(sy(*v)),
            fmt(slot * 0.6),
            fmt(sy(0.0) - sy(*v)),
            COLORS[i % COLORS.len()]
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            fmt(x + slot * 0.3),
            fmt(H - MARGIN + 16.0),
            label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.06 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn svg_open(
    title: &str,
    x_label: &str,
    y_label: &str,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        fmt(W / 2.0),
        title
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = fmt(MARGIN),
        b = fmt(H - MARGIN),
        r = fmt(W - MARGIN)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = fmt(MARGIN),
        t = fmt(MARGIN),
        b = fmt(H - MARGIN)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{} ({} .. {})</text>",
        fmt(W / 2.0),
        fmt(H - 14.0),
        x_label,
        fmt(x0),
        fmt(x1)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{} ({} .. {})</text>",
        fmt(H / 2.0),
        fmt(H / 2.0),
        y_label,
        fmt(y0),
        fmt(y1)
    );
    svg
}

/// Render every chart for a results directory. Returns the files written.
pub fn plot_dir(dir: &Path) -> anyhow::Result<Vec<String>> {
    let rows = parse_records(&dir.join("records.csv"))?;
    let groups = group_series(&rows);
    let mut written = Vec::new();
    let mut gap_bars = Vec::new();
    let mut variance_series = Vec::new();
    for (key, series) in &groups {
        let svg = line_chart(
            &format!("normalized minimum vs side ({key})"),
            "t",
            "m / t^(d-1)",
            series,
        );
        let name = format!("convergence_{}.svg", key.replace(['(', ')', ','], "_"));
        crate::output::write_text(&dir.join(&name), &svg)?;
        written.push(name);
        // Spread decay per group (first mode), as squared standard error.
        if let Some(s) = series.first() {
            let pts: Vec<(f64, f64, f64)> = s
                .points
                .iter()
                .map(|&(t, _, band)| (t, (band / 2.0).powi(2), 0.0))
                .collect();
            variance_series.push(Series { label: key.clone(), points: pts });
        }
        if series.len() == 2 {
            let last = |s: &Series| s.points.last().map(|p| p.1).unwrap_or(f64::NAN);
            let full = series.iter().find(|s| s.label == "full").map(last);
            let tb = series.iter().find(|s| s.label == "top_bottom").map(last);
            if let (Some(f), Some(tbv)) = (full, tb) {
                gap_bars.push((key.clone(), (f - tbv).abs() / f));
            }
        }
    }
    let svg = line_chart(
        "squared standard error of the normalized minimum",
        "t",
        "SE^2",
        &variance_series,
    );
    crate::output::write_text(&dir.join("variance_decay.svg"), &svg)?;
    written.push("variance_decay.svg".into());
    if !gap_bars.is_empty() {
        let svg = bar_chart("full vs top-bottom relative gap at the largest side", &gap_bars);
        crate::output::write_text(&dir.join("bc_gap.svg"), &svg)?;
        written.push("bc_gap.svg".into());
    }
    Ok(written)
}
