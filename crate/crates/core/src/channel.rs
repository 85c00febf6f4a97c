//! Correlated Rayleigh fading, AWGN and deterministic random streams.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Random stream used for every simulated draw.
pub type SimRng = ChaCha8Rng;

/// Transmit-side correlation parameter γ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CorrelationParam(f64);

impl CorrelationParam {
    pub fn new(gamma: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&gamma) {
            Ok(Self(gamma))
        } else {
            Err(Error::InvalidGamma(gamma))
        }
    }

    pub fn gamma(self) -> f64 {
        self.0
    }

    /// Correlation E[h₁₁·h₁₂*] = 2γ/(1+γ²) induced between the two transmit
    /// antennas seen by one receive antenna.
    pub fn induced_correlation(self) -> f64 {
        2.0 * self.0 / (1.0 + self.0 * self.0)
    }
}

/// One realization of the 2×2 channel matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
    /// Independent draws f₁..f₄ the coefficients were mixed from.
    pub raw: [Complex64; 4],
}

impl ChannelSample {
    /// Mixes four independent unit-variance draws with transmit correlation γ.
    pub fn from_raw(gamma: CorrelationParam, raw: [Complex64; 4]) -> Self {
        let g = gamma.gamma();
        let norm = (1.0 + g * g).sqrt().recip();
        let [f1, f2, f3, f4] = raw;
        Self {
            h11: (f1 + f2 * g) * norm,
            h12: (f1 * g + f2) * norm,
            h21: (f3 + f4 * g) * norm,
            h22: (f3 * g + f4) * norm,
            raw,
        }
    }

    /// Channel column seen by the user-1 symbol.
    pub fn col1(&self) -> [Complex64; 2] {
        [self.h11, self.h21]
    }

    /// Channel column seen by the user-2 symbol.
    pub fn col2(&self) -> [Complex64; 2] {
        [self.h12, self.h22]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVector {
    pub w1: Complex64,
    pub w2: Complex64,
    /// Per-antenna complex noise variance E[|wᵢ|²].
    pub n0: f64,
}

/// Circularly-symmetric complex Gaussian with E[|z|²] = `variance`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sigma = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * sigma, im * sigma)
}

pub fn sample_channel<R: rand::Rng + ?Sized>(gamma: CorrelationParam, rng: &mut R) -> ChannelSample {
    let raw = [
        complex_gaussian(rng, 1.0),
        complex_gaussian(rng, 1.0),
        complex_gaussian(rng, 1.0),
        complex_gaussian(rng, 1.0),
    ];
    ChannelSample::from_raw(gamma, raw)
}

pub fn sample_noise<R: rand::Rng + ?Sized>(n0: f64, rng: &mut R) -> Result<NoiseVector> {
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidNoise(n0));
    }
    Ok(NoiseVector { w1: complex_gaussian(rng, n0), w2: complex_gaussian(rng, n0), n0 })
}

/// Deterministic substream keyed by `(master_seed, labels)`.
///
/// The ChaCha key is the SHA-256 digest of a length-prefixed little-endian
/// encoding of the inputs, so streams are stable across platforms and label
/// tuples of different lengths never collide.
pub fn derive_stream(master_seed: u64, labels: &[u64]) -> SimRng {
    let mut hasher = Sha256::new();
    hasher.update(b"noma-lab/stream/v1");
    hasher.update(master_seed.to_le_bytes());
    hasher.update((labels.len() as u64).to_le_bytes());
    for label in labels {
        hasher.update(label.to_le_bytes());
    }
    let seed: [u8; 32] = hasher.finalize().into();
    SimRng::from_seed(seed)
}
