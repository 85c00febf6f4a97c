//! Joint ML and successive-interference-cancellation detection over the 2×2 link.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::{ChannelSample, NoiseVector};
use crate::constellation::{Constellation, MAX_POINTS};
use crate::superposition::PowerSplit;

/// Metrics closer than this to the running minimum count as a tie.
pub const TIE_TOL: f64 = 1e-12;

/// Received samples on the two user antennas, R = HX + W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedVector {
    pub r1: Complex64,
    pub r2: Complex64,
}

impl ReceivedVector {
    /// Forms R = H·(√α x₁, √(1−α) x₂)ᵀ + W.
    pub fn transmit(
        h: &ChannelSample,
        split: PowerSplit,
        x1: Complex64,
        x2: Complex64,
        noise: Option<&NoiseVector>,
    ) -> Self {
        let s1 = x1 * split.user1_gain();
        let s2 = x2 * split.user2_gain();
        let (w1, w2) = noise.map_or((Complex64::default(), Complex64::default()), |w| (w.w1, w.w2));
        Self { r1: h.h11 * s1 + h.h12 * s2 + w1, r2: h.h21 * s1 + h.h22 * s2 + w2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub x1_index: usize,
    pub x2_index: usize,
    /// Minimized squared Euclidean distance.
    pub metric: f64,
    /// Another candidate reached the minimum within [`TIE_TOL`].
    pub tie: bool,
    /// Number of candidate metrics evaluated.
    pub metric_evals: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Ml,
    Sic,
}

impl Detector {
    pub fn detect(
        self,
        r: &ReceivedVector,
        h: &ChannelSample,
        split: PowerSplit,
        c: &Constellation,
    ) -> DetectionResult {
        match self {
            Detector::Ml => ml_detect(r, h, split, c),
            Detector::Sic => sic_detect(r, h, split, c),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Ml => "ml",
            Detector::Sic => "sic",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Detector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ml" => Ok(Detector::Ml),
            "sic" => Ok(Detector::Sic),
            other => Err(format!("unknown detector '{other}' (expected ml or sic)")),
        }
    }
}

/// Running argmin with lexicographic tie-breaking: a later candidate only
/// replaces the incumbent when it is smaller by more than [`TIE_TOL`].
struct ArgMin {
    index: usize,
    metric: f64,
    tie: bool,
}

impl ArgMin {
    fn new() -> Self {
        Self { index: 0, metric: f64::INFINITY, tie: false }
    }

    #[inline]
    fn offer(&mut self, index: usize, metric: f64) {
        if metric < self.metric - TIE_TOL {
            self.index = index;
            self.metric = metric;
            self.tie = false;
        } else if metric <= self.metric + TIE_TOL {
            self.tie = true;
            self.metric = self.metric.min(metric);
        }
    }
}

#[inline]
fn dist2(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    (a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()
}

/// Exhaustive joint ML detection: minimizes ‖R − HX‖² over all M² pairs.
pub fn ml_detect(r: &ReceivedVector, h: &ChannelSample, split: PowerSplit, c: &Constellation) -> DetectionResult {
    let m = c.size();
    let (g1, g2) = (split.user1_gain(), split.user2_gain());
    let mut user2 = [[Complex64::default(); 2]; MAX_POINTS];
    for (slot, &x) in user2.iter_mut().zip(c.points()) {
        let s = x * g2;
        *slot = [h.h12 * s, h.h22 * s];
    }
    let user2 = &user2[..m];

    let mut best = ArgMin::new();
    for (i, &x1) in c.points().iter().enumerate() {
        let s = x1 * g1;
        let residual = [r.r1 - h.h11 * s, r.r2 - h.h21 * s];
        for (j, v) in user2.iter().enumerate() {
            best.offer(i * m + j, dist2(residual, *v));
        }
    }
    DetectionResult {
        x1_index: best.index / m,
        x2_index: best.index % m,
        metric: best.metric,
        tie: best.tie,
        metric_evals: (m * m) as u32,
    }
}

/// Two-stage SIC: detect user 1 treating user 2 as noise, cancel it, then
/// detect user 2 on the residual.
pub fn sic_detect(r: &ReceivedVector, h: &ChannelSample, split: PowerSplit, c: &Constellation) -> DetectionResult {
    let (g1, g2) = (split.user1_gain(), split.user2_gain());
    let received = [r.r1, r.r2];

    let mut first = ArgMin::new();
    for (i, &x) in c.points().iter().enumerate() {
        let s = x * g1;
        first.offer(i, dist2(received, [h.h11 * s, h.h21 * s]));
    }
    let s = c.point(first.index) * g1;
    let residual = [r.r1 - h.h11 * s, r.r2 - h.h21 * s];

    let mut second = ArgMin::new();
    for (j, &x) in c.points().iter().enumerate() {
        let s = x * g2;
        second.offer(j, dist2(residual, [h.h12 * s, h.h22 * s]));
    }
    DetectionResult {
        x1_index: first.index,
        x2_index: second.index,
        metric: second.metric,
        tie: first.tie || second.tie,
        metric_evals: (2 * c.size()) as u32,
    }
}

/// Per-user Hamming distance between true and detected bit labels.
pub fn count_bit_errors(truth: (usize, usize), detected: &DetectionResult) -> (u32, u32) {
    ((truth.0 ^ detected.x1_index).count_ones(), (truth.1 ^ detected.x2_index).count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{derive_stream, sample_channel, sample_noise, CorrelationParam};
    use crate::superposition::compose;
    use rand::Rng;

    fn split(a: f64) -> PowerSplit {
        PowerSplit::new(a).unwrap()
    }

    fn gamma(g: f64) -> CorrelationParam {
        CorrelationParam::new(g).unwrap()
    }

    #[test]
    fn noiseless_ml_recovers_truth() {
        let mut rng = derive_stream(1, &[10]);
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            for _ in 0..500 {
                let h = sample_channel(gamma(0.0), &mut rng);
                let (i, j) = (rng.random_range(0..c.size()), rng.random_range(0..c.size()));
                let r = ReceivedVector::transmit(&h, split(0.8), c.point(i), c.point(j), None);
                let d = ml_detect(&r, &h, split(0.8), &c);
                assert_eq!((d.x1_index, d.x2_index), (i, j));
                assert!(d.metric < 1e-20);
            }
        }
    }

    #[test]
    fn degenerate_composite_reports_tie() {
        let c = Constellation::qpsk();
        let s = compose(&c, split(0.5));
        let mut rng = derive_stream(1, &[11]);
        let h = sample_channel(gamma(1.0), &mut rng);
        for class in &s.coincidence_classes {
            for &(i, j) in class {
                let r = ReceivedVector::transmit(&h, split(0.5), c.point(i), c.point(j), None);
                let d = ml_detect(&r, &h, split(0.5), &c);
                assert!(d.tie);
                // Lowest pair in the class wins.
                assert_eq!((d.x1_index, d.x2_index), class[0]);
            }
        }
    }

    #[test]
    fn sic_recovers_truth_with_strong_imbalance() {
        let mut rng = derive_stream(1, &[12]);
        let c = Constellation::qpsk();
        for _ in 0..200 {
            let h = sample_channel(gamma(0.0), &mut rng);
            for i in 0..4 {
                for j in 0..4 {
                    let r = ReceivedVector::transmit(&h, split(0.99), c.point(i), c.point(j), None);
                    let d = sic_detect(&r, &h, split(0.99), &c);
                    let ml = ml_detect(&r, &h, split(0.99), &c);
                    assert_eq!((ml.x1_index, ml.x2_index), (i, j));
                    // Stage 1 can only fail when |h_col2|/|h_col1| is extreme.
                    let ratio = (h.h12.norm_sqr() + h.h22.norm_sqr()) / (h.h11.norm_sqr() + h.h21.norm_sqr());
                    if ratio < 4.0 {
                        assert_eq!((d.x1_index, d.x2_index), (i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn metric_counters() {
        let mut rng = derive_stream(1, &[13]);
        let h = sample_channel(gamma(0.5), &mut rng);
        let r = ReceivedVector { r1: Complex64::new(0.1, 0.2), r2: Complex64::new(-0.3, 0.0) };
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            let m = c.size() as u32;
            assert_eq!(ml_detect(&r, &h, split(0.7), &c).metric_evals, m * m);
            assert_eq!(sic_detect(&r, &h, split(0.7), &c).metric_evals, 2 * m);
        }
    }

    #[test]
    fn ml_is_exhaustive_minimum() {
        let mut rng = derive_stream(1, &[14]);
        let c = Constellation::qam16();
        for _ in 0..300 {
            let h = sample_channel(gamma(0.9), &mut rng);
            let w = sample_noise(0.05, &mut rng).unwrap();
            let r = ReceivedVector::transmit(&h, split(0.9), c.point(3), c.point(7), Some(&w));
            let d = ml_detect(&r, &h, split(0.9), &c);
            for i in 0..16 {
                for j in 0..16 {
                    let x = ReceivedVector::transmit(&h, split(0.9), c.point(i), c.point(j), None);
                    let m = (r.r1 - x.r1).norm_sqr() + (r.r2 - x.r2).norm_sqr();
                    assert!(m >= d.metric - 1e-9);
                }
            }
        }
    }

    #[test]
    fn scale_equivariance_and_determinism() {
        let mut rng = derive_stream(1, &[15]);
        let c = Constellation::qam16();
        let k = Complex64::new(-1.7, 0.4);
        for _ in 0..300 {
            let h = sample_channel(gamma(0.5), &mut rng);
            let w = sample_noise(0.2, &mut rng).unwrap();
            let r = ReceivedVector::transmit(&h, split(0.6), c.point(1), c.point(9), Some(&w));
            let hs = ChannelSample { h11: h.h11 * k, h12: h.h12 * k, h21: h.h21 * k, h22: h.h22 * k, raw: h.raw };
            let rs = ReceivedVector { r1: r.r1 * k, r2: r.r2 * k };
            let a = ml_detect(&r, &h, split(0.6), &c);
            let b = ml_detect(&rs, &hs, split(0.6), &c);
            assert_eq!((a.x1_index, a.x2_index), (b.x1_index, b.x2_index));
            assert!((b.metric - a.metric * k.norm_sqr()).abs() < 1e-9 * (1.0 + b.metric));
            assert_eq!(a, ml_detect(&r, &h, split(0.6), &c));
        }
    }

    #[test]
    fn bit_error_counts() {
        let d = |i, j| DetectionResult { x1_index: i, x2_index: j, metric: 0.0, tie: false, metric_evals: 0 };
        assert_eq!(count_bit_errors((2, 1), &d(2, 1)), (0, 0));
        assert_eq!(count_bit_errors((0b00, 0), &d(0b11, 0)), (2, 0));
        let c = Constellation::qam16();
        let mut total = 0;
        let mut table = 0;
        for t in 0..16 {
            for e in 0..16 {
                let (u1, u2) = count_bit_errors((t, e), &d(e, t));
                total += u1 + u2;
                let a = c.label_bits(t);
                let b = c.label_bits(e);
                table += 2 * a.iter().zip(&b).filter(|(x, y)| x != y).count() as u32;
            }
        }
        assert_eq!(total, table);
    }

    #[test]
    fn detector_names() {
        assert_eq!("ML".parse::<Detector>(), Ok(Detector::Ml));
        assert_eq!("sic".parse::<Detector>(), Ok(Detector::Sic));
        assert!("zf".parse::<Detector>().is_err());
        assert_eq!(Detector::Sic.to_string(), "sic");
    }
}
