//! Statistical self-checks of the channel generator and the BER engine.

use num_complex::Complex64;

use crate::channel::{derive_stream, sample_channel, sample_noise, ChannelSample, CorrelationParam, SimRng};
use crate::montecarlo::validate_single_user;

/// Samples used by the Rayleigh envelope test.
pub const KS_SAMPLES: usize = 100_000;
pub const KS_SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

/// Sample moments of the channel coefficients at one γ.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub gamma: f64,
    pub samples: usize,
    /// E|h11|², E|h12|², E|h21|², E|h22|².
    pub power: [f64; 4],
    /// E[h11·h12*] and E[h21·h22*].
    pub row_correlation: [Complex64; 2],
    pub expected_correlation: f64,
    /// E[h11·h21*] and E[h12·h22*] with their standard errors.
    pub cross_row: [Complex64; 2],
    pub cross_row_se: [f64; 2],
    pub ks_statistic: f64,
    pub ks_p_value: f64,
}

#[derive(Default)]
struct MeanVar {
    sum: Complex64,
    sum_sq: f64,
}

impl MeanVar {
    fn push(&mut self, z: Complex64) {
        self.sum += z;
        self.sum_sq += z.norm_sqr();
    }

    fn mean(&self, n: usize) -> Complex64 {
        self.sum / n as f64
    }

    fn std_error(&self, n: usize) -> f64 {
        let n = n as f64;
        let var = self.sum_sq / n - (self.sum / n).norm_sqr();
        (var.max(0.0) / n).sqrt()
    }
}

/// Measures channel statistics with a pluggable generator.
pub fn measure_channel<F>(gamma: CorrelationParam, samples: usize, rng: &mut SimRng, mut sampler: F) -> ChannelStats
where
    F: FnMut(CorrelationParam, &mut SimRng) -> ChannelSample,
{
    let mut power = [0.0; 4];
    let mut rows = [Complex64::default(); 2];
    let mut cross = [MeanVar::default(), MeanVar::default()];
    let mut envelopes = Vec::with_capacity(KS_SAMPLES.min(samples));
    for k in 0..samples {
        let h = sampler(gamma, rng);
        for (p, v) in power.iter_mut().zip([h.h11, h.h12, h.h21, h.h22]) {
            *p += v.norm_sqr();
        }
        rows[0] += h.h11 * h.h12.conj();
        rows[1] += h.h21 * h.h22.conj();
        cross[0].push(h.h11 * h.h21.conj());
        cross[1].push(h.h12 * h.h22.conj());
        if k < KS_SAMPLES {
            envelopes.push(h.h11.norm());
        }
    }
    let n = samples as f64;
    let (ks_statistic, ks_p_value) = ks_test(&mut envelopes, |r| 1.0 - (-r * r).exp());
    ChannelStats {
        gamma: gamma.gamma(),
        samples,
        power: power.map(|p| p / n),
        row_correlation: rows.map(|r| r / n),
        expected_correlation: gamma.induced_correlation(),
        cross_row: [cross[0].mean(samples), cross[1].mean(samples)],
        cross_row_se: [cross[0].std_error(samples), cross[1].std_error(samples)],
        ks_statistic,
        ks_p_value,
    }
}

impl ChannelStats {
    pub fn checks(&self) -> Vec<CheckResult> {
        let g = self.gamma;
        let mut out = Vec::new();
        let worst_power = self.power.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
        out.push(CheckResult::new(
            format!("channel power gamma={g}"),
            worst_power <= 0.01,
            format!("E|h_ij|^2 = {:.5?}", self.power),
        ));
        // Relative 1% tolerance; absolute 0.01 when the expected value is 0.
        let expected = self.expected_correlation;
        let tol = if expected > 0.0 { 0.01 * expected } else { 0.01 };
        let worst_corr =
            self.row_correlation.iter().map(|r| (r - Complex64::new(expected, 0.0)).norm()).fold(0.0, f64::max);
        out.push(CheckResult::new(
            format!("transmit correlation gamma={g}"),
            worst_corr <= tol,
            format!(
                "E[h11 h12*] = {:.5}, E[h21 h22*] = {:.5}, expected 2g/(1+g^2) = {expected:.5}",
                self.row_correlation[0], self.row_correlation[1]
            ),
        ));
        let cross_ok = self.cross_row.iter().zip(self.cross_row_se).all(|(m, se)| m.norm() <= 3.0 * se);
        out.push(CheckResult::new(
            format!("receive decorrelation gamma={g}"),
            cross_ok,
            format!(
                "E[h11 h21*] = {:.2e} (se {:.1e}), E[h12 h22*] = {:.2e} (se {:.1e})",
                self.cross_row[0].norm(),
                self.cross_row_se[0],
                self.cross_row[1].norm(),
                self.cross_row_se[1]
            ),
        ));
        out.push(CheckResult::new(
            format!("rayleigh envelope gamma={g}"),
            self.ks_p_value > KS_SIGNIFICANCE,
            format!("KS D = {:.5}, p = {:.3}", self.ks_statistic, self.ks_p_value),
        ));
        out
    }
}

/// One-sample Kolmogorov–Smirnov test; returns (D, asymptotic p-value).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let d = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    (d, kolmogorov_survival(lambda))
}

/// Q_KS(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²).
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub struct ValidationOptions {
    pub samples: usize,
    pub seed: u64,
    pub gammas: Vec<f64>,
    pub single_user_snr_db: Vec<f64>,
    pub single_user_target_errors: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            gammas: vec![0.0, 0.5, 0.9, 1.0],
            single_user_snr_db: (0..=30).step_by(5).map(f64::from).collect(),
            single_user_target_errors: 20_000,
        }
    }
}

/// Channel-statistics checks for every γ using `sampler`.
pub fn channel_checks<F>(opts: &ValidationOptions, mut sampler: F) -> Vec<CheckResult>
where
    F: FnMut(CorrelationParam, &mut SimRng) -> ChannelSample,
{
    let mut out = Vec::new();
    for (k, &g) in opts.gammas.iter().enumerate() {
        let gamma = match CorrelationParam::new(g) {
            Ok(gamma) => gamma,
            Err(e) => {
                out.push(CheckResult::new(format!("gamma={g}"), false, e.to_string()));
                continue;
            }
        };
        let mut rng = derive_stream(opts.seed, &[u64::from_le_bytes(*b"validate"), k as u64]);
        out.extend(measure_channel(gamma, opts.samples, &mut rng, &mut sampler).checks());
    }
    out
}

pub fn noise_check(opts: &ValidationOptions) -> CheckResult {
    let n0 = 0.1;
    let mut rng = derive_stream(opts.seed, &[u64::from_le_bytes(*b"noisechk")]);
    let mut power = 0.0;
    for _ in 0..opts.samples {
        let w = sample_noise(n0, &mut rng).expect("positive n0");
        power += 0.5 * (w.w1.norm_sqr() + w.w2.norm_sqr());
    }
    let power = power / opts.samples as f64;
    CheckResult::new("noise variance", (power - n0).abs() <= 0.01 * n0, format!("E|w|^2 = {power:.6}, n0 = {n0}"))
}

pub fn single_user_checks(opts: &ValidationOptions) -> Vec<CheckResult> {
    validate_single_user(&opts.single_user_snr_db, opts.seed, opts.single_user_target_errors)
        .into_iter()
        .map(|p| {
            CheckResult::new(
                format!("single-user rayleigh qpsk snr={} dB", p.snr_db),
                p.within_sigma(3.0),
                format!(
                    "simulated {:.5e} vs analytic {:.5e} (se {:.2e}, {} errors)",
                    p.ber, p.analytic_ber, p.std_error, p.bit_errors
                ),
            )
        })
        .collect()
}

/// The full suite with the production channel generator.
pub fn run_all(opts: &ValidationOptions) -> Vec<CheckResult> {
    let mut out = channel_checks(opts, sample_channel);
    out.push(noise_check(opts));
    out.extend(single_user_checks(opts));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_gaussian;

    #[test]
    fn ks_accepts_matching_and_rejects_mismatched() {
        let mut rng = derive_stream(2, &[]);
        let mut good: Vec<f64> = (0..20_000).map(|_| complex_gaussian(&mut rng, 1.0).norm()).collect();
        let (_, p) = ks_test(&mut good, |r| 1.0 - (-r * r).exp());
        assert!(p > 0.01, "{p}");
        let mut bad: Vec<f64> = (0..20_000).map(|_| complex_gaussian(&mut rng, 1.3).norm()).collect();
        let (_, p) = ks_test(&mut bad, |r| 1.0 - (-r * r).exp());
        assert!(p < 1e-6, "{p}");
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard table: Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098.
        assert!((kolmogorov_survival(1.36) - 0.049).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn wrong_mixing_is_caught() {
        let opts = ValidationOptions { samples: 200_000, gammas: vec![0.5], ..Default::default() };
        // Mixing weight applied as γ² instead of γ.
        let buggy = |g: CorrelationParam, rng: &mut SimRng| {
            sample_channel(CorrelationParam::new(g.gamma() * g.gamma()).unwrap(), rng)
        };
        let checks = channel_checks(&opts, buggy);
        let corr = checks.iter().find(|c| c.name.starts_with("transmit correlation")).unwrap();
        assert!(!corr.passed);
        let good = channel_checks(&opts, sample_channel);
        assert!(good.iter().all(|c| c.passed), "{good:?}");
    }
}
