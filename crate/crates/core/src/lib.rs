//! Link-level simulation of a two-user power-domain NOMA downlink over
//! correlated Rayleigh fading.
//!
//! The crate covers the base alphabets ([`constellation`]), the composite
//! constellation and its minimum-distance analysis ([`superposition`]),
//! correlated fading and noise ([`channel`]), ML and SIC receivers
//! ([`detection`]), the seeded BER engine ([`montecarlo`]) and the
//! command-line front end ([`cli`]).

pub mod channel;
pub mod cli;
pub mod constellation;
pub mod detection;
pub mod error;
pub mod montecarlo;
pub mod superposition;
pub mod validation;

pub use channel::{derive_stream, sample_channel, sample_noise, ChannelSample, CorrelationParam, NoiseVector};
pub use constellation::{make_16qam, make_qpsk, pairwise_min_distance, Constellation};
pub use detection::{count_bit_errors, ml_detect, sic_detect, DetectionResult, Detector, ReceivedVector};
pub use error::{Error, Result};
pub use montecarlo::{run_point, run_sweep, snr_gap, validate_single_user, BerCurve, BerPoint, SweepConfig};
pub use superposition::{
    compose, dmin_16qam, dmin_general, dmin_qpsk, optimal_alpha, PowerSplit, SuperposedConstellation,
};
