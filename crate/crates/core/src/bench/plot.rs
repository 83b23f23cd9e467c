//! Standalone SVG line charts: BER on a log axis or detection time on a
//! linear axis, against SNR.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::BerRecord;
use crate::error::{Error, Result};

/// Zero-BER points are drawn here and marked.
pub const BER_FLOOR: f64 = 1e-7;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Ber,
    Time,
}

impl FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ber" => Ok(PlotKind::Ber),
            "time" => Ok(PlotKind::Time),
            other => Err(Error::Config(format!(
                "unknown plot kind `{other}` (ber | time)"
            ))),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Series<'a> {
    name: &'a str,
    points: Vec<(f64, f64)>,
}

fn group(records: &[BerRecord], kind: PlotKind) -> Vec<Series<'_>> {
    let mut out: Vec<Series<'_>> = Vec::new();
    for r in records {
        let v = match kind {
            PlotKind::Ber => r.ber,
            PlotKind::Time => r.wall_time_ms,
        };
        match out.iter_mut().find(|s| s.name == r.detector) {
            Some(s) => s.points.push((r.snr_db, v)),
            None => out.push(Series {
                name: &r.detector,
                points: vec![(r.snr_db, v)],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

pub fn render_svg(records: &[BerRecord], kind: PlotKind) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("nothing to plot: no records".into()));
    }
    let series = group(records, kind);

    let (mut xmin, mut xmax) = records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.snr_db), hi.max(r.snr_db))
        });
    if xmax - xmin < 1e-12 {
        xmin -= 1.0;
        xmax += 1.0;
    }

    // y range in plotted units (log10 for BER)
    let (ymin, ymax) = match kind {
        PlotKind::Ber => {
            let lo = records
                .iter()
                .map(|r| r.ber.max(BER_FLOOR))
                .fold(f64::INFINITY, f64::min);
            let hi = records.iter().map(|r| r.ber).fold(BER_FLOOR, f64::max);
            let lo = lo.log10().floor();
            let hi = hi.log10().ceil().max(lo + 1.0);
            (lo, hi)
        }
        PlotKind::Time => {
            let hi = records.iter().map(|r| r.wall_time_ms).fold(0.0, f64::max);
            (0.0, if hi > 0.0 { hi * 1.1 } else { 1.0 })
        }
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let value = |v: f64| match kind {
        PlotKind::Ber => v.max(BER_FLOOR).log10(),
        PlotKind::Time => v,
    };
    let sy = |v: f64| TOP + (ymax - value(v)) / (ymax - ymin) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes and grid
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let xticks = 6;
    for i in 0..=xticks {
        let x = xmin + (xmax - xmin) * i as f64 / xticks as f64;
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            trim_num(x)
        );
    }
    match kind {
        PlotKind::Ber => {
            let mut e = ymin as i32;
            while e as f64 <= ymax {
                let py = sy(10f64.powi(e));
                let _ = writeln!(
                    s,
                    r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
                    LEFT + plot_w
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
                    LEFT - 6.0,
                    py + 4.0
                );
                e += 1;
            }
        }
        PlotKind::Time => {
            for i in 0..=5 {
                let v = ymax * i as f64 / 5.0;
                let py = sy(v);
                let _ = writeln!(
                    s,
                    r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
                    LEFT + plot_w
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                    LEFT - 6.0,
                    py + 4.0,
                    trim_num(v)
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">SNR (dB)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let ylabel = match kind {
        PlotKind::Ber => "BER",
        PlotKind::Time => "detection time (ms)",
    };
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{ylabel}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // data
    let mut floored = false;
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, v)| format!("{:.2},{:.2}", sx(x), sy(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-detector="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(ser.name),
            pts.join(" ")
        );
        for &(x, v) in &ser.points {
            if kind == PlotKind::Ber && v <= 0.0 {
                floored = true;
                let _ = writeln!(
                    s,
                    r#"<circle class="floor-marker" cx="{:.2}" cy="{:.2}" r="4" fill="white" stroke="{color}"/>"#,
                    sx(x),
                    sy(v)
                );
            } else {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(x),
                    sy(v)
                );
            }
        }
    }

    // legend
    let lx = LEFT + plot_w + 15.0;
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(ser.name)
        );
    }
    if floored {
        let ly = TOP + 10.0 + 20.0 * series.len() as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<text class="floor-note" x="{lx:.2}" y="{ly:.2}" font-size="10">open circle: BER = 0</text>"#
        );
        let _ = writeln!(
            s,
            r#"<text class="floor-note" x="{lx:.2}" y="{:.2}" font-size="10">(drawn at 1e-7)</text>"#,
            ly + 14.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn emit_plot(records: &[BerRecord], kind: PlotKind, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_svg(records, kind)?)?;
    Ok(())
}
