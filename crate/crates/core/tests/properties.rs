use noma_lab::channel::{derive_stream, sample_channel, sample_noise, CorrelationParam};
use noma_lab::constellation::Constellation;
use noma_lab::detection::{count_bit_errors, ml_detect, sic_detect, ReceivedVector};
use noma_lab::montecarlo::{run_point, SweepConfig};
use noma_lab::superposition::{compose, dmin_general, PowerSplit};
use noma_lab::Detector;
use num_complex::Complex64;
use proptest::prelude::*;

fn constellation(qam: bool) -> Constellation {
    if qam {
        Constellation::qam16()
    } else {
        Constellation::qpsk()
    }
}

proptest! {
    #[test]
    fn map_demap_round_trip(qam in any::<bool>(), label in 0usize..16) {
        let c = constellation(qam);
        let label = label % c.size();
        let bits = c.label_bits(label);
        let symbols = c.map_bits(&bits).unwrap();
        prop_assert_eq!(symbols.len(), 1);
        prop_assert_eq!(c.label_of(symbols[0]).unwrap(), label);
        prop_assert_eq!(c.demap(symbols[0]).unwrap(), bits);
        prop_assert!(c.label_of(symbols[0] + Complex64::new(0.01, -0.01)).is_err());
    }

    #[test]
    fn ml_is_never_beaten(seed in any::<u64>(), qam in any::<bool>(), alpha in 0.5f64..0.999, gamma in 0.0f64..=1.0) {
        let c = constellation(qam);
        let split = PowerSplit::new(alpha).unwrap();
        let mut rng = derive_stream(seed, &[]);
        let h = sample_channel(CorrelationParam::new(gamma).unwrap(), &mut rng);
        let w = sample_noise(0.3, &mut rng).unwrap();
        let rx = ReceivedVector::transmit(&h, split, c.point(1), c.point(2), Some(&w));
        let ml = ml_detect(&rx, &h, split, &c);
        let sic = sic_detect(&rx, &h, split, &c);
        prop_assert!(ml.metric <= sic.metric + 1e-12);
        for i in 0..c.size() {
            for j in 0..c.size() {
                let cand = ReceivedVector::transmit(&h, split, c.point(i), c.point(j), None);
                let m = (rx.r1 - cand.r1).norm_sqr() + (rx.r2 - cand.r2).norm_sqr();
                prop_assert!(ml.metric <= m + 1e-12);
            }
        }
    }

    #[test]
    fn bit_errors_bounded(truth in (0usize..16, 0usize..16), got in (0usize..16, 0usize..16)) {
        let (e1, e2) = count_bit_errors(truth, &noma_lab::DetectionResult {
            x1_index: got.0, x2_index: got.1, metric: 0.0, tie: false, metric_evals: 0,
        });
        prop_assert!(e1 <= 4 && e2 <= 4);
        prop_assert_eq!(e1 == 0, truth.0 == got.0);
        prop_assert_eq!(e2 == 0, truth.1 == got.1);
    }

    #[test]
    fn composite_dmin_matches_compose(qam in any::<bool>(), alpha in 0.5f64..0.999) {
        let c = constellation(qam);
        let s = compose(&c, PowerSplit::new(alpha).unwrap());
        prop_assert!((s.d_min - dmin_general(&c, alpha).unwrap()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn run_point_is_deterministic(seed in any::<u64>(), snr in 0.0f64..20.0) {
        let cfg = SweepConfig::new("qpsk", &[0.5], &[0.8], &[snr], Detector::Ml, seed)
            .unwrap()
            .with_limits(5000, 100)
            .unwrap();
        let gamma = cfg.gammas[0];
        let split = cfg.alphas[0];
        prop_assert_eq!(run_point(&cfg, gamma, split, snr), run_point(&cfg, gamma, split, snr));
    }
}
