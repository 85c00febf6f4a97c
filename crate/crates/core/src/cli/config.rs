//! Flat `key = value` sweep configuration files.
//!
//! Keys mirror the `sweep` flags (`preset`, `seed`, `detector`,
//! `target-errors`, `max-symbols`, `workers`, `out`, `svg`) plus the grid keys
//! `constellation`, `gammas`, `alphas` and `snr-db`. Lists are comma
//! separated; `snr-db` also accepts `start:step:stop`. Fractions such as
//! `16/17` are accepted wherever a real is expected.

use std::collections::BTreeMap;

const KEYS: [&str; 12] = [
    "preset",
    "seed",
    "detector",
    "target-errors",
    "max-symbols",
    "workers",
    "out",
    "svg",
    "constellation",
    "gammas",
    "alphas",
    "snr-db",
];

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let key = match key.as_str() {
            "gamma" => "gammas".to_string(),
            "alpha" => "alphas".to_string(),
            _ => key,
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key '{key}'", n + 1));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", n + 1));
        }
    }
    Ok(out)
}

/// Parses a real, allowing `a/b` fractions.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("invalid number '{s}'"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("invalid number '{s}'"))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_real).collect()
}

/// `start:step:stop` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (parse_real(start)?, parse_real(step)?, parse_real(stop)?);
            if step <= 0.0 || stop < start {
                return Err(format!("invalid range '{s}'"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(format!("range '{s}' has too many points"));
            }
            Ok((0..=n).map(|k| start + k as f64 * step).collect())
        }
        [_] => parse_list(s),
        _ => Err(format!("invalid grid '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let cfg = parse_config("# fig2 variant\npreset = fig2\nalpha = 0.8, 16/17\nmax_symbols=5000 # cap\n").unwrap();
        assert_eq!(cfg["preset"], "fig2");
        assert_eq!(cfg["max-symbols"], "5000");
        assert_eq!(parse_list(&cfg["alphas"]).unwrap(), vec![0.8, 16.0 / 17.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_config("preset fig2").is_err());
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("seed = 1\nseed = 2").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:2:6").unwrap(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(parse_grid("0, 5,10").unwrap(), vec![0.0, 5.0, 10.0]);
        assert!(parse_grid("0:0:6").is_err());
        assert!(parse_grid("1:2").is_err());
    }
}
