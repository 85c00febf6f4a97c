//! Seeded BER sweeps over the (γ, α, SNR) grid.
//!
//! Each grid point is simulated in fixed-size chunks. Chunk `k` of a point
//! draws from `derive_stream(seed, [constellation, γ, α, SNR, k])`, rounds of
//! chunks run in parallel, and the early-stop rule is applied to the chunks in
//! index order. The result of a point is therefore a pure function of the
//! configuration, whatever the worker count.

use std::ops::AddAssign;

use rand::RngCore;
use rayon::prelude::*;

use crate::channel::{complex_gaussian, derive_stream, sample_channel, sample_noise, CorrelationParam, SimRng};
use crate::constellation::Constellation;
use crate::detection::{count_bit_errors, Detector, ReceivedVector};
use crate::error::{Error, Result};
use crate::superposition::PowerSplit;

/// Symbols per work unit.
pub const CHUNK_SYMBOLS: u64 = 2048;
/// Upper bound on chunks evaluated in one parallel round.
const MAX_ROUND_CHUNKS: u64 = 32;

pub const DEFAULT_TARGET_ERRORS: u64 = 200;
pub const DEFAULT_MAX_SYMBOLS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub constellation_name: String,
    pub gammas: Vec<CorrelationParam>,
    pub alphas: Vec<PowerSplit>,
    pub snr_db_grid: Vec<f64>,
    pub detector: Detector,
    pub max_symbols: u64,
    pub target_bit_errors: u64,
    pub master_seed: u64,
}

impl SweepConfig {
    /// Config with default stopping rules; grids are validated.
    pub fn new(
        constellation_name: &str,
        gammas: &[f64],
        alphas: &[f64],
        snr_db_grid: &[f64],
        detector: Detector,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            constellation_name: constellation_name.to_string(),
            gammas: gammas.iter().map(|&g| CorrelationParam::new(g)).collect::<Result<_>>()?,
            alphas: alphas.iter().map(|&a| PowerSplit::new(a)).collect::<Result<_>>()?,
            snr_db_grid: snr_db_grid.to_vec(),
            detector,
            max_symbols: DEFAULT_MAX_SYMBOLS,
            target_bit_errors: DEFAULT_TARGET_ERRORS,
            master_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_limits(mut self, max_symbols: u64, target_bit_errors: u64) -> Result<Self> {
        self.max_symbols = max_symbols;
        self.target_bit_errors = target_bit_errors;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        Constellation::by_name(&self.constellation_name)?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.gammas.is_empty() || self.alphas.is_empty() || self.snr_db_grid.is_empty() {
            return bad("gamma, alpha and SNR grids must be non-empty");
        }
        if self.snr_db_grid.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite");
        }
        if self.snr_db_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("SNR grid must be strictly increasing");
        }
        if self.max_symbols < 1_000 {
            return bad("max_symbols must be at least 1000");
        }
        if self.target_bit_errors < 100 {
            return bad("target_bit_errors must be at least 100");
        }
        Ok(())
    }

    fn constellation(&self) -> Constellation {
        Constellation::by_name(&self.constellation_name).expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub gamma: f64,
    pub alpha: f64,
    pub snr_db: f64,
    pub symbols_simulated: u64,
    pub bit_errors_u1: u64,
    pub bit_errors_u2: u64,
    pub ber_u1: f64,
    pub ber_u2: f64,
    pub ber_avg: f64,
    pub tie_fraction: f64,
    /// Stopped on `max_symbols` before reaching the error target.
    pub capped: bool,
    /// Σ over symbols of (u1 + u2 bit errors)², for the standard error.
    pub error_sq_sum: u64,
    pub bits_per_symbol: u32,
}

impl BerPoint {
    /// Standard error of `ber_avg`, from the per-symbol spread of error counts
    /// (bit errors within one symbol are not independent).
    pub fn std_error_avg(&self) -> f64 {
        let n = self.symbols_simulated as f64;
        let mean = (self.bit_errors_u1 + self.bit_errors_u2) as f64 / n;
        let var = (self.error_sq_sum as f64 / n - mean * mean).max(0.0);
        (var / n).sqrt() / (2.0 * self.bits_per_symbol as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub constellation: String,
    pub gamma: f64,
    pub alpha: f64,
    pub detector: Detector,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn snr_db(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.snr_db).collect()
    }

    pub fn ber_avg(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ber_avg).collect()
    }

    pub fn at_snr(&self, snr_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| p.snr_db == snr_db)
    }
}

/// Integer counters accumulated over a chunk of symbols.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub symbols: u64,
    pub errors_u1: u64,
    pub errors_u2: u64,
    pub error_sq: u64,
    pub ties: u64,
}

impl AddAssign for Tally {
    fn add_assign(&mut self, rhs: Self) {
        self.symbols += rhs.symbols;
        self.errors_u1 += rhs.errors_u1;
        self.errors_u2 += rhs.errors_u2;
        self.error_sq += rhs.error_sq;
        self.ties += rhs.ties;
    }
}

/// Runs chunks in deterministic rounds until `done` holds or `max_symbols` is
/// spent. Returns the tally and whether the symbol cap ended the run.
pub(crate) fn run_chunked<F, D>(master_seed: u64, labels: &[u64], max_symbols: u64, done: D, chunk: F) -> (Tally, bool)
where
    F: Fn(&mut SimRng, u64) -> Tally + Sync,
    D: Fn(&Tally) -> bool,
{
    let total_chunks = max_symbols.div_ceil(CHUNK_SYMBOLS);
    let mut tally = Tally::default();
    let mut next = 0u64;
    let mut round = 1u64;
    while next < total_chunks {
        let end = (next + round).min(total_chunks);
        let results: Vec<Tally> = (next..end)
            .into_par_iter()
            .map(|k| {
                let mut key = labels.to_vec();
                key.push(k);
                let mut rng = derive_stream(master_seed, &key);
                let len = CHUNK_SYMBOLS.min(max_symbols - k * CHUNK_SYMBOLS);
                chunk(&mut rng, len)
            })
            .collect();
        for r in results {
            tally += r;
            if done(&tally) {
                return (tally, false);
            }
        }
        next = end;
        round = (round * 2).min(MAX_ROUND_CHUNKS);
    }
    (tally, !done(&tally))
}

fn constellation_label(name: &str) -> u64 {
    match name {
        "qpsk" => 0,
        "16qam" => 1,
        _ => u64::MAX,
    }
}

/// Simulates one grid point. The detector is not part of the stream key, so
/// ML and SIC runs at the same point see the same symbols, fades and noise.
pub fn run_point(cfg: &SweepConfig, gamma: CorrelationParam, split: PowerSplit, snr_db: f64) -> BerPoint {
    let c = cfg.constellation();
    let n0 = c.avg_energy() / 10f64.powf(snr_db / 10.0);
    let m_mask = c.size() as u32 - 1;
    let detector = cfg.detector;
    let labels = [constellation_label(c.name()), gamma.gamma().to_bits(), split.alpha().to_bits(), snr_db.to_bits()];
    let target = cfg.target_bit_errors;

    let (tally, capped) = run_chunked(
        cfg.master_seed,
        &labels,
        cfg.max_symbols,
        |t| t.errors_u1 >= target && t.errors_u2 >= target,
        |rng, len| {
            let mut t = Tally::default();
            for _ in 0..len {
                let draw = rng.next_u32();
                let i = (draw & m_mask) as usize;
                let j = ((draw >> 8) & m_mask) as usize;
                let h = sample_channel(gamma, rng);
                let w = sample_noise(n0, rng).expect("n0 > 0");
                let r = ReceivedVector::transmit(&h, split, c.point(i), c.point(j), Some(&w));
                let d = detector.detect(&r, &h, split, &c);
                let (e1, e2) = count_bit_errors((i, j), &d);
                let e = (e1 + e2) as u64;
                t.errors_u1 += e1 as u64;
                t.errors_u2 += e2 as u64;
                t.error_sq += e * e;
                t.ties += d.tie as u64;
            }
            t.symbols = len;
            t
        },
    );

    let bits = (tally.symbols * c.bits_per_symbol() as u64) as f64;
    let ber_u1 = tally.errors_u1 as f64 / bits;
    let ber_u2 = tally.errors_u2 as f64 / bits;
    BerPoint {
        gamma: gamma.gamma(),
        alpha: split.alpha(),
        snr_db,
        symbols_simulated: tally.symbols,
        bit_errors_u1: tally.errors_u1,
        bit_errors_u2: tally.errors_u2,
        ber_u1,
        ber_u2,
        ber_avg: 0.5 * (ber_u1 + ber_u2),
        tie_fraction: tally.ties as f64 / tally.symbols as f64,
        capped,
        error_sq_sum: tally.error_sq,
        bits_per_symbol: c.bits_per_symbol(),
    }
}

/// Runs every grid point on the current rayon pool; curves are ordered by
/// γ then α as listed in the config.
pub fn run_sweep(cfg: &SweepConfig) -> Vec<BerCurve> {
    let mut curves = Vec::new();
    for &gamma in &cfg.gammas {
        for &split in &cfg.alphas {
            let points = cfg.snr_db_grid.par_iter().map(|&snr| run_point(cfg, gamma, split, snr)).collect();
            curves.push(BerCurve {
                constellation: cfg.constellation_name.clone(),
                gamma: gamma.gamma(),
                alpha: split.alpha(),
                detector: cfg.detector,
                points,
            });
        }
    }
    curves
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<Vec<BerCurve>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| run_sweep(cfg)))
}

/// SNR (dB) at which a curve first falls to `ber_level`, interpolating
/// linearly in log10(BER) between the bracketing points.
pub fn crossing_snr(curve: &BerCurve, ber_level: f64) -> Option<f64> {
    let target = ber_level.log10();
    curve
        .points
        .windows(2)
        .find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.ber_avg > ber_level && b.ber_avg <= ber_level {
                if b.ber_avg <= 0.0 {
                    return Some(b.snr_db);
                }
                let (la, lb) = (a.ber_avg.log10(), b.ber_avg.log10());
                Some(a.snr_db + (target - la) / (lb - la) * (b.snr_db - a.snr_db))
            } else {
                None
            }
        })
        .or_else(|| curve.points.first().filter(|p| p.ber_avg <= ber_level).map(|p| p.snr_db))
}

/// Horizontal gap in dB between two curves at `ber_level` (positive when
/// `curve_a` needs more SNR). `None` when either curve never gets there.
pub fn snr_gap(curve_a: &BerCurve, curve_b: &BerCurve, ber_level: f64) -> Option<f64> {
    Some(crossing_snr(curve_a, ber_level)? - crossing_snr(curve_b, ber_level)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleUserPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub analytic_ber: f64,
    pub std_error: f64,
    pub symbols: u64,
    pub bit_errors: u64,
}

impl SingleUserPoint {
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.ber - self.analytic_ber).abs() <= k * self.std_error
    }
}

/// Closed-form Gray QPSK bit error rate on unit-variance Rayleigh fading at
/// per-bit SNR `g` (linear).
pub fn rayleigh_qpsk_ber(g: f64) -> f64 {
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}

/// Single-user 1×1 QPSK over Rayleigh fading with ML detection, compared with
/// the closed form. `snr_db` is the symbol SNR Es/N0; the per-bit SNR is half.
pub fn validate_single_user(snr_db_grid: &[f64], seed: u64, target_errors: u64) -> Vec<SingleUserPoint> {
    let c = Constellation::qpsk();
    let max_symbols = 50_000_000;
    snr_db_grid
        .par_iter()
        .map(|&snr_db| {
            let snr = 10f64.powf(snr_db / 10.0);
            let n0 = c.avg_energy() / snr;
            let (t, _) = run_chunked(
                seed,
                &[u64::from_le_bytes(*b"single\0\0"), snr_db.to_bits()],
                max_symbols,
                |t| t.errors_u1 >= target_errors,
                |rng, len| {
                    let mut t = Tally::default();
                    for _ in 0..len {
                        let i = (rng.next_u32() & 3) as usize;
                        let h = complex_gaussian(rng, 1.0);
                        let y = h * c.point(i) + complex_gaussian(rng, n0);
                        let detected = (0..4)
                            .min_by(|&a, &b| {
                                (y - h * c.point(a)).norm_sqr().total_cmp(&(y - h * c.point(b)).norm_sqr())
                            })
                            .unwrap();
                        let e = (i ^ detected).count_ones() as u64;
                        t.errors_u1 += e;
                        t.error_sq += e * e;
                    }
                    t.symbols = len;
                    t
                },
            );
            let n = t.symbols as f64;
            let bits = 2.0 * n;
            let mean = t.errors_u1 as f64 / n;
            let var = (t.error_sq as f64 / n - mean * mean).max(0.0);
            SingleUserPoint {
                snr_db,
                ber: t.errors_u1 as f64 / bits,
                analytic_ber: rayleigh_qpsk_ber(snr / 2.0),
                std_error: (var / n).sqrt() / 2.0,
                symbols: t.symbols,
                bit_errors: t.errors_u1,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(snr_db: f64, ber: f64) -> BerPoint {
        BerPoint {
            gamma: 0.0,
            alpha: 0.5,
            snr_db,
            symbols_simulated: 1,
            bit_errors_u1: 0,
            bit_errors_u2: 0,
            ber_u1: ber,
            ber_u2: ber,
            ber_avg: ber,
            tie_fraction: 0.0,
            capped: false,
            error_sq_sum: 0,
            bits_per_symbol: 2,
        }
    }

    fn curve(points: &[(f64, f64)]) -> BerCurve {
        BerCurve {
            constellation: "qpsk".into(),
            gamma: 0.0,
            alpha: 0.5,
            detector: Detector::Ml,
            points: points.iter().map(|&(s, b)| point(s, b)).collect(),
        }
    }

    #[test]
    fn crossing_interpolates_in_log_domain() {
        let c = curve(&[(0.0, 1e-1), (10.0, 1e-3), (20.0, 1e-5)]);
        assert!((crossing_snr(&c, 1e-2).unwrap() - 5.0).abs() < 1e-12);
        assert!((crossing_snr(&c, 1e-4).unwrap() - 15.0).abs() < 1e-12);
        assert_eq!(crossing_snr(&c, 1e-7), None);
    }

    #[test]
    fn gap_examples() {
        let a = curve(&[(0.0, 1e-1), (10.0, 1e-3), (20.0, 1e-5)]);
        let b = curve(&[(0.0, 1e-2), (10.0, 1e-4), (20.0, 1e-6)]);
        assert_eq!(snr_gap(&a, &a, 1e-3), Some(0.0));
        assert!((snr_gap(&a, &b, 1e-3).unwrap() - 5.0).abs() < 1e-12);
        let floor = curve(&[(0.0, 0.3), (10.0, 0.25), (20.0, 0.25)]);
        assert_eq!(snr_gap(&floor, &a, 1e-3), None);
    }

    #[test]
    fn config_validation() {
        let ok = SweepConfig::new("qpsk", &[1.0], &[0.8], &[0.0, 2.0], Detector::Ml, 1).unwrap();
        assert!(ok.clone().with_limits(999, 200).is_err());
        assert!(ok.clone().with_limits(1000, 99).is_err());
        assert!(SweepConfig::new("8psk", &[1.0], &[0.8], &[0.0], Detector::Ml, 1).is_err());
        assert!(SweepConfig::new("qpsk", &[], &[0.8], &[0.0], Detector::Ml, 1).is_err());
        assert!(SweepConfig::new("qpsk", &[1.0], &[0.8], &[2.0, 0.0], Detector::Ml, 1).is_err());
        assert!(SweepConfig::new("qpsk", &[1.2], &[0.8], &[0.0], Detector::Ml, 1).is_err());
    }

    #[test]
    fn zero_snr_limit_is_coin_flip() {
        let cfg = SweepConfig::new("qpsk", &[0.5], &[0.7], &[-60.0], Detector::Ml, 9)
            .unwrap()
            .with_limits(20_000, 5_000)
            .unwrap();
        let p = run_point(&cfg, cfg.gammas[0], cfg.alphas[0], -60.0);
        assert!((p.ber_avg - 0.5).abs() < 0.01, "{}", p.ber_avg);
    }

    #[test]
    fn ber_point_bookkeeping() {
        let cfg = SweepConfig::new("16qam", &[0.9], &[0.9], &[10.0], Detector::Ml, 3)
            .unwrap()
            .with_limits(10_000, 100)
            .unwrap();
        let p = run_point(&cfg, cfg.gammas[0], cfg.alphas[0], 10.0);
        let bits = (p.symbols_simulated * 4) as f64;
        assert_eq!(p.ber_u1, p.bit_errors_u1 as f64 / bits);
        assert_eq!(p.ber_u2, p.bit_errors_u2 as f64 / bits);
        assert_eq!(p.ber_avg, 0.5 * (p.ber_u1 + p.ber_u2));
        assert!(p.bit_errors_u1 >= 100 && p.bit_errors_u2 >= 100);
        assert!(!p.capped);
        assert!(p.std_error_avg() > 0.0 && p.std_error_avg() < p.ber_avg);
    }

    #[test]
    fn capped_point_is_flagged() {
        let cfg = SweepConfig::new("qpsk", &[0.0], &[0.8], &[60.0], Detector::Ml, 3)
            .unwrap()
            .with_limits(5_000, 100)
            .unwrap();
        let p = run_point(&cfg, cfg.gammas[0], cfg.alphas[0], 60.0);
        assert!(p.capped);
        assert_eq!(p.symbols_simulated, 5_000);
    }

    #[test]
    fn analytic_single_user_values() {
        assert!((rayleigh_qpsk_ber(1e-12) - 0.5).abs() < 1e-6);
        assert!((rayleigh_qpsk_ber(10.0) - 0.023268).abs() < 1e-6);
    }
}
