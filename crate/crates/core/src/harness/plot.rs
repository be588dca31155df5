//! Static SVG plots of BER against vertical coupling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::records::{read_csv, BerRecord};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 260.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Reads a results CSV and writes the plot next to it or to `svg`.
pub fn emit_plot(csv: &Path, svg: &Path) -> Result<()> {
    let records = read_csv(csv)?;
    std::fs::write(svg, render_svg(&records)).map_err(|e| Error::io(svg, e))
}

type Column = (&'static str, Box<dyn Fn(&BerRecord) -> String>);

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    coded: bool,
}

/// One curve per detector and coded/uncoded BER, further split by any
/// column (alpha, beta, quantized, max_in, max_out) that varies in the file.
/// Zero or missing BER values cannot sit on a log axis and are left out.
pub fn render_svg(records: &[BerRecord]) -> String {
    let series = collect_series(records);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    if all.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">no plottable data</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
        out.push_str("</svg>\n");
        return out;
    }

    let (mut x0, mut x1) = min_max(all.iter().map(|p| p.0));
    if x1 - x0 < 1e-12 {
        let pad = (x0.abs() * 0.05).max(1e-3);
        x0 -= pad;
        x1 += pad;
    }
    let (lo, hi) = min_max(all.iter().map(|p| p.1.log10()));
    let (d0, mut d1) = (lo.floor(), hi.ceil());
    if d1 <= d0 {
        d1 = d0 + 1.0;
    }
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |b: f64| TOP + (d1 - b.log10()) / (d1 - d0) * ph;

    // Decade grid and labels.
    let mut d = d0;
    while d <= d1 {
        let y = TOP + (d1 - d) / (d1 - d0) * ph;
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
        d += 1.0;
    }
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(x),
            TOP + ph + 18.0,
            trim(x)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">gamma_v</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">BER</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if s.coded { "" } else { r#" stroke-dasharray="6 4""# };
        if s.points.len() > 1 {
            let pts: Vec<String> = s.points.iter().map(|&(x, b)| format!("{:.2},{:.2}", sx(x), sy(b))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                pts.join(" ")
            );
        }
        for &(x, b) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(b)
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn collect_series(records: &[BerRecord]) -> Vec<Series> {
    let varies = |f: &dyn Fn(&BerRecord) -> String| {
        records.iter().map(f).collect::<std::collections::BTreeSet<_>>().len() > 1
    };
    let extras: Vec<Column> = vec![
        ("alpha", Box::new(|r: &BerRecord| trim(r.alpha))),
        ("beta", Box::new(|r: &BerRecord| trim(r.beta))),
        ("quantized", Box::new(|r: &BerRecord| r.quantized.to_string())),
        ("max_in", Box::new(|r: &BerRecord| r.max_in.to_string())),
        ("max_out", Box::new(|r: &BerRecord| r.max_out.to_string())),
    ];
    let extras: Vec<_> = extras.into_iter().filter(|(_, f)| varies(f.as_ref())).collect();

    // Label to series plus the number of rows it covers.
    let mut groups: BTreeMap<String, (Series, usize)> = BTreeMap::new();
    for r in records {
        let mut key = r.detector.to_string();
        for (name, f) in &extras {
            let _ = write!(key, " {name}={}", f(r));
        }
        for (coded, ber) in [(false, r.uncoded_ber), (true, r.coded_ber)] {
            let label = format!("{key} {}", if coded { "coded" } else { "uncoded" });
            let (series, rows) = groups.entry(label.clone()).or_insert((
                Series {
                    label,
                    points: Vec::new(),
                    coded,
                },
                0,
            ));
            *rows += 1;
            if ber.is_finite() && ber > 0.0 {
                series.points.push((r.gamma_v, ber));
            }
        }
    }
    let mut out = Vec::new();
    for (mut s, rows) in groups.into_values() {
        if s.points.is_empty() {
            log::warn!("series {:?} has no positive BER values; skipped", s.label);
            continue;
        }
        if s.points.len() < rows {
            log::warn!("series {:?}: {} zero or missing points omitted", s.label, rows - s.points.len());
        }
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.push(s);
    }
    out
}

fn min_max(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

fn trim(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DetectorKind;

    fn rec(det: DetectorKind, g: f64, u: f64, c: f64) -> BerRecord {
        BerRecord {
            gamma_v: g,
            alpha: 0.5,
            beta: 1.0,
            detector: det,
            quantized: false,
            max_in: 50,
            max_out: 1,
            uncoded_ber: u,
            coded_ber: c,
            wl_errors: 1,
            trials: 1,
            censored: false,
            seconds: 0.0,
        }
    }

    #[test]
    fn single_point_is_one_marker_per_series() {
        let svg = render_svg(&[rec(DetectorKind::SumProduct, 0.1, 0.01, 1e-4)]);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert!(svg.contains(">sum_product coded<") && svg.contains(">sum_product uncoded<"));
    }

    #[test]
    fn empty_series_are_skipped() {
        let svg = render_svg(&[
            rec(DetectorKind::CellByCell, 0.1, 0.02, 0.0),
            rec(DetectorKind::CellByCell, 0.12, 0.03, f64::NAN),
        ]);
        assert!(svg.contains(">cell_by_cell uncoded<"));
        assert!(!svg.contains("cell_by_cell coded"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(render_svg(&[]).contains("no plottable data"));
    }

    #[test]
    fn varying_columns_enter_labels() {
        let mut a = rec(DetectorKind::SumProduct, 0.1, 0.01, 0.001);
        let mut b = a.clone();
        b.max_out = 10;
        b.max_in = 20;
        a.gamma_v = 0.11;
        let svg = render_svg(&[a, b]);
        assert!(svg.contains(">sum_product max_in=20 max_out=10 coded<"));
        assert!(svg.contains(">sum_product max_in=50 max_out=1 uncoded<"));
    }
}
