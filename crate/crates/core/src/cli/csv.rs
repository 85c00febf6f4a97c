//! BER table serialization.

use crate::montecarlo::BerCurve;

pub const HEADER: &str =
    "constellation,detector,gamma,alpha,snr_db,symbols,bit_errors_u1,bit_errors_u2,ber_u1,ber_u2,ber_avg,tie_fraction";

/// Formats like C's `%.10g`: ten significant digits, trailing zeros trimmed,
/// exponent form outside [1e−4, 1e10).
pub fn format_g10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (9 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(curves: &[BerCurve]) -> String {
    let mut out = String::with_capacity(128 * curves.len() * 32);
    out.push_str(HEADER);
    out.push('\n');
    for curve in curves {
        for p in &curve.points {
            let row = [
                curve.constellation.clone(),
                curve.detector.to_string(),
                format_g10(p.gamma),
                format_g10(p.alpha),
                format_g10(p.snr_db),
                p.symbols_simulated.to_string(),
                p.bit_errors_u1.to_string(),
                p.bit_errors_u2.to_string(),
                format_g10(p.ber_u1),
                format_g10(p.ber_u2),
                format_g10(p.ber_avg),
                format_g10(p.tie_fraction),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

/// One parsed CSV row (the fields the plotter needs).
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub constellation: String,
    pub detector: String,
    pub gamma: f64,
    pub alpha: f64,
    pub snr_db: f64,
    pub ber_avg: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        _ => return Err("missing or unexpected CSV header".into()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 12 {
                return Err(format!("line {}: expected 12 fields, got {}", i + 2, f.len()));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|e| format!("line {}: field {}: {e}", i + 2, k + 1));
            Ok(Row {
                constellation: f[0].to_string(),
                detector: f[1].to_string(),
                gamma: num(2)?,
                alpha: num(3)?,
                snr_db: num(4)?,
                ber_avg: num(10)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g10_formatting() {
        assert_eq!(format_g10(0.8), "0.8");
        assert_eq!(format_g10(16.0 / 17.0), "0.9411764706");
        assert_eq!(format_g10(40.0), "40");
        assert_eq!(format_g10(0.0), "0");
        assert_eq!(format_g10(1.5e-5), "1.5e-05");
        assert_eq!(format_g10(2.0 / 3.0 * 1e-6), "6.666666667e-07");
        assert_eq!(format_g10(0.000123), "0.000123");
        assert_eq!(format_g10(-2.5), "-2.5");
        assert_eq!(format_g10(12345678901.0), "1.23456789e+10");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_csv("a,b\n").is_err());
        let bad = format!("{HEADER}\nqpsk,ml,1,0.8\n");
        assert!(parse_csv(&bad).is_err());
        let good = format!("{HEADER}\nqpsk,ml,1,0.8,10,100,3,4,0.015,0.02,0.0175,0\n");
        let rows = parse_csv(&good).unwrap();
        assert_eq!(rows[0].ber_avg, 0.0175);
    }
}
