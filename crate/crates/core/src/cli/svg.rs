//! Standalone SVG rendering of BER curves read back from CSV.

use std::fmt::Write;

use super::csv::{format_g10, Row};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn group(rows: &[Row]) -> Vec<Series> {
    let mut out: Vec<(String, Series)> = Vec::new();
    let gammas_differ = rows.windows(2).any(|w| w[0].gamma != w[1].gamma);
    for r in rows {
        let key = format!("{}|{}|{}|{}", r.constellation, r.detector, r.gamma, r.alpha);
        let idx = match out.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                let mut label = format!("alpha={}", format_g10(r.alpha));
                if gammas_differ {
                    label = format!("gamma={} {label}", format_g10(r.gamma));
                }
                out.push((key, Series { label, points: Vec::new() }));
                out.len() - 1
            }
        };
        out[idx].1.points.push((r.snr_db, r.ber_avg));
    }
    out.into_iter().map(|(_, s)| s).collect()
}

/// Log-scale BER vs SNR plot, one polyline per (γ, α). Zero-BER points are
/// omitted.
pub fn render(rows: &[Row], title: &str) -> String {
    let series = group(rows);
    let positive = rows.iter().map(|r| r.ber_avg).filter(|&b| b > 0.0);
    let min_ber = positive.fold(1.0f64, f64::min);
    let decade_lo = min_ber.log10().floor().min(-1.0);
    let x_lo = rows.iter().map(|r| r.snr_db).fold(f64::INFINITY, f64::min);
    let x_hi = rows.iter().map(|r| r.snr_db).fold(f64::NEG_INFINITY, f64::max);
    let (x_lo, x_hi) = if x_lo.is_finite() && x_hi > x_lo { (x_lo, x_hi) } else { (0.0, 1.0) };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |b: f64| TOP + (0.0 - b.log10()) / (0.0 - decade_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // Decade grid lines on the BER axis.
    let mut decade = 0.0;
    while decade >= decade_lo {
        let y = sy(10f64.powf(decade));
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + plot_w);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            decade as i32
        );
        decade -= 1.0;
    }
    let x_step = nice_step(x_hi - x_lo);
    let mut x = (x_lo / x_step).ceil() * x_step;
    while x <= x_hi + 1e-9 {
        let px = sx(x);
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#eee"/>"##, TOP + plot_h);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 16.0,
            format_g10(x)
        );
        x += x_step;
    }
    let _ =
        writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">SNR (dB)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">BER</text>"#,
        TOP + plot_h / 2.0
    );

    for (k, series) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|(_, b)| *b > 0.0)
            .map(|&(x, b)| format!("{:.2},{:.2}", sx(x), sy(b)))
            .collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&v| v >= raw).unwrap_or(raw)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alpha: f64, snr_db: f64, ber_avg: f64) -> Row {
        Row { constellation: "qpsk".into(), detector: "ml".into(), gamma: 1.0, alpha, snr_db, ber_avg }
    }

    #[test]
    fn one_polyline_per_alpha() {
        let rows = vec![
            row(0.5, 0.0, 0.3),
            row(0.5, 10.0, 0.25),
            row(0.8, 0.0, 0.2),
            row(0.8, 10.0, 1e-4),
            row(0.8, 20.0, 0.0),
        ];
        let svg = render(&rows, "test");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("alpha=0.8"));
        assert!(svg.contains("1e-4"));
        assert!(!svg.contains("href"));
    }
}
