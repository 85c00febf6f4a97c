//! Python module `noma_lab`.

use noma_lab::channel::{derive_stream, sample_channel as draw_channel, CorrelationParam};
use noma_lab::cli::csv::to_csv as curves_to_csv;
use noma_lab::montecarlo::{self, BerCurve, BerPoint, SweepConfig};
use noma_lab::superposition::{self, PowerSplit};
use noma_lab::{ChannelSample, Detector, ReceivedVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Constellation", module = "noma_lab", frozen)]
struct PyConstellation(noma_lab::Constellation);

#[pymethods]
impl PyConstellation {
    /// Unit-energy constellation by name: "qpsk" or "16qam".
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        noma_lab::Constellation::by_name(name).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_points(name: &str, points: Vec<Complex64>) -> PyResult<Self> {
        noma_lab::Constellation::from_points(name, points).map(Self).map_err(value_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn points(&self) -> Vec<Complex64> {
        self.0.points().to_vec()
    }

    #[getter]
    fn bits_per_symbol(&self) -> u32 {
        self.0.bits_per_symbol()
    }

    #[getter]
    fn min_distance(&self) -> f64 {
        self.0.min_distance()
    }

    #[getter]
    fn avg_energy(&self) -> f64 {
        self.0.avg_energy()
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn map_bits(&self, bits: Vec<u8>) -> PyResult<Vec<Complex64>> {
        self.0.map_bits(&bits).map_err(value_err)
    }

    /// Bits of an exact constellation point, as a list of ints.
    fn demap(&self, symbol: Complex64) -> PyResult<Vec<u32>> {
        let bits = self.0.demap(symbol).map_err(value_err)?;
        Ok(bits.into_iter().map(u32::from).collect())
    }

    fn __repr__(&self) -> String {
        format!("Constellation({:?}, size={})", self.0.name(), self.0.size())
    }
}

#[pyclass(name = "Detection", module = "noma_lab", frozen, get_all)]
struct PyDetection {
    x1_index: usize,
    x2_index: usize,
    metric: f64,
    tie: bool,
    metric_evals: u32,
}

#[pyclass(name = "BerPoint", module = "noma_lab", frozen, get_all)]
struct PyBerPoint {
    gamma: f64,
    alpha: f64,
    snr_db: f64,
    symbols: u64,
    bit_errors_u1: u64,
    bit_errors_u2: u64,
    ber_u1: f64,
    ber_u2: f64,
    ber_avg: f64,
    tie_fraction: f64,
    capped: bool,
    std_error: f64,
}

impl From<&BerPoint> for PyBerPoint {
    fn from(p: &BerPoint) -> Self {
        Self {
            gamma: p.gamma,
            alpha: p.alpha,
            snr_db: p.snr_db,
            symbols: p.symbols_simulated,
            bit_errors_u1: p.bit_errors_u1,
            bit_errors_u2: p.bit_errors_u2,
            ber_u1: p.ber_u1,
            ber_u2: p.ber_u2,
            ber_avg: p.ber_avg,
            tie_fraction: p.tie_fraction,
            capped: p.capped,
            std_error: p.std_error_avg(),
        }
    }
}

#[pyclass(name = "BerCurve", module = "noma_lab", frozen)]
struct PyBerCurve(BerCurve);

#[pymethods]
impl PyBerCurve {
    #[getter]
    fn constellation(&self) -> String {
        self.0.constellation.clone()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    #[getter]
    fn detector(&self) -> &'static str {
        self.0.detector.as_str()
    }

    #[getter]
    fn snr_db(&self) -> Vec<f64> {
        self.0.snr_db()
    }

    #[getter]
    fn ber_avg(&self) -> Vec<f64> {
        self.0.ber_avg()
    }

    #[getter]
    fn points(&self) -> Vec<PyBerPoint> {
        self.0.points.iter().map(PyBerPoint::from).collect()
    }

    /// SNR in dB where ber_avg first falls to `level`, log-interpolated.
    #[pyo3(signature = (level = 1e-3))]
    fn crossing_snr(&self, level: f64) -> Option<f64> {
        montecarlo::crossing_snr(&self.0, level)
    }

    fn __repr__(&self) -> String {
        format!(
            "BerCurve({}, detector={}, gamma={}, alpha={}, points={})",
            self.0.constellation,
            self.0.detector,
            self.0.gamma,
            self.0.alpha,
            self.0.points.len()
        )
    }
}

fn detector(name: &str) -> PyResult<Detector> {
    name.parse().map_err(PyValueError::new_err)
}

#[allow(clippy::too_many_arguments)]
fn config(
    constellation: &str,
    gammas: &[f64],
    alphas: &[f64],
    snr_db: &[f64],
    detector_name: &str,
    seed: u64,
    max_symbols: u64,
    target_errors: u64,
) -> PyResult<SweepConfig> {
    SweepConfig::new(constellation, gammas, alphas, snr_db, detector(detector_name)?, seed)
        .and_then(|c| c.with_limits(max_symbols, target_errors))
        .map_err(value_err)
}

fn channel_from(h: [[Complex64; 2]; 2]) -> ChannelSample {
    ChannelSample { h11: h[0][0], h12: h[0][1], h21: h[1][0], h22: h[1][1], raw: [h[0][0], h[0][1], h[1][0], h[1][1]] }
}

#[pyfunction]
fn dmin_qpsk(alpha: f64) -> PyResult<f64> {
    superposition::dmin_qpsk(alpha).map_err(value_err)
}

#[pyfunction]
fn dmin_16qam(alpha: f64) -> PyResult<f64> {
    superposition::dmin_16qam(alpha).map_err(value_err)
}

/// Composite minimum distance by enumeration over all pairs.
#[pyfunction]
fn dmin_general(constellation: &PyConstellation, alpha: f64) -> PyResult<f64> {
    superposition::dmin_general(&constellation.0, alpha).map_err(value_err)
}

#[pyfunction]
fn optimal_alpha(constellation: &PyConstellation) -> f64 {
    superposition::optimal_alpha(&constellation.0)
}

/// One 2×2 channel draw as nested lists, from a keyed stream.
#[pyfunction]
#[pyo3(signature = (gamma, seed, labels = Vec::new()))]
fn sample_channel(gamma: f64, seed: u64, labels: Vec<u64>) -> PyResult<[[Complex64; 2]; 2]> {
    let gamma = CorrelationParam::new(gamma).map_err(value_err)?;
    let mut rng = derive_stream(seed, &labels);
    let h = draw_channel(gamma, &mut rng);
    Ok([[h.h11, h.h12], [h.h21, h.h22]])
}

#[pyfunction]
#[pyo3(signature = (r, h, alpha, constellation, detector = "ml"))]
fn detect(
    r: (Complex64, Complex64),
    h: [[Complex64; 2]; 2],
    alpha: f64,
    constellation: &PyConstellation,
    detector: &str,
) -> PyResult<PyDetection> {
    let split = PowerSplit::new(alpha).map_err(value_err)?;
    let rx = ReceivedVector { r1: r.0, r2: r.1 };
    let d = self::detector(detector)?.detect(&rx, &channel_from(h), split, &constellation.0);
    Ok(PyDetection {
        x1_index: d.x1_index,
        x2_index: d.x2_index,
        metric: d.metric,
        tie: d.tie,
        metric_evals: d.metric_evals,
    })
}

#[pyfunction]
#[pyo3(signature = (constellation, gamma, alpha, snr_db, detector = "ml", seed = 1,
                    max_symbols = montecarlo::DEFAULT_MAX_SYMBOLS, target_errors = montecarlo::DEFAULT_TARGET_ERRORS))]
#[allow(clippy::too_many_arguments)]
fn run_point(
    py: Python<'_>,
    constellation: &str,
    gamma: f64,
    alpha: f64,
    snr_db: f64,
    detector: &str,
    seed: u64,
    max_symbols: u64,
    target_errors: u64,
) -> PyResult<PyBerPoint> {
    let cfg = config(constellation, &[gamma], &[alpha], &[snr_db], detector, seed, max_symbols, target_errors)?;
    let p = py.detach(|| montecarlo::run_point(&cfg, cfg.gammas[0], cfg.alphas[0], snr_db));
    Ok(PyBerPoint::from(&p))
}

/// Full sweep; one curve per (γ, α) in input order.
#[pyfunction]
#[pyo3(signature = (constellation, gammas, alphas, snr_db, detector = "ml", seed = 1,
                    max_symbols = montecarlo::DEFAULT_MAX_SYMBOLS, target_errors = montecarlo::DEFAULT_TARGET_ERRORS,
                    workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    py: Python<'_>,
    constellation: &str,
    gammas: Vec<f64>,
    alphas: Vec<f64>,
    snr_db: Vec<f64>,
    detector: &str,
    seed: u64,
    max_symbols: u64,
    target_errors: u64,
    workers: Option<usize>,
) -> PyResult<Vec<PyBerCurve>> {
    let cfg = config(constellation, &gammas, &alphas, &snr_db, detector, seed, max_symbols, target_errors)?;
    let curves = py.detach(|| match workers {
        Some(n) => montecarlo::run_sweep_with_workers(&cfg, n),
        None => Ok(montecarlo::run_sweep(&cfg)),
    });
    Ok(curves.map_err(value_err)?.into_iter().map(PyBerCurve).collect())
}

#[pyfunction]
#[pyo3(signature = (a, b, level = 1e-3))]
fn snr_gap(a: &PyBerCurve, b: &PyBerCurve, level: f64) -> Option<f64> {
    montecarlo::snr_gap(&a.0, &b.0, level)
}

#[pyfunction]
fn to_csv(curves: Vec<PyRef<'_, PyBerCurve>>) -> String {
    let owned: Vec<BerCurve> = curves.iter().map(|c| c.0.clone()).collect();
    curves_to_csv(&owned)
}

#[pymodule(name = "noma_lab")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConstellation>()?;
    m.add_class::<PyDetection>()?;
    m.add_class::<PyBerPoint>()?;
    m.add_class::<PyBerCurve>()?;
    m.add_function(wrap_pyfunction!(dmin_qpsk, m)?)?;
    m.add_function(wrap_pyfunction!(dmin_16qam, m)?)?;
    m.add_function(wrap_pyfunction!(dmin_general, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(sample_channel, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(run_point, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(snr_gap, m)?)?;
    m.add_function(wrap_pyfunction!(to_csv, m)?)?;
    Ok(())
}
