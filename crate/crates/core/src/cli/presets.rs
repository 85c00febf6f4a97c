use crate::detection::Detector;

/// A named sweep reproducing one published BER figure.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub constellation: &'static str,
    pub gamma: f64,
    pub alphas: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub detector: Detector,
}

const QPSK_ALPHAS: [f64; 6] = [0.5, 0.65, 0.7, 0.8, 0.9, 0.95];
const QAM16_ALPHAS: [f64; 4] = [0.5, 0.9, 16.0 / 17.0, 0.99];

fn grid(stop: u32) -> Vec<f64> {
    (0..=stop).step_by(2).map(f64::from).collect()
}

pub fn preset(name: &str) -> Option<ScenarioPreset> {
    let (constellation, gamma) = match name {
        "fig2" => ("qpsk", 1.0),
        "fig3" => ("qpsk", 0.9),
        "fig4" => ("qpsk", 0.5),
        "fig5" => ("16qam", 1.0),
        "fig6" => ("16qam", 0.9),
        "fig7" => ("16qam", 0.5),
        _ => return None,
    };
    let name = PRESET_NAMES.iter().find(|&&n| n == name)?;
    let (alphas, snr_db) =
        if constellation == "qpsk" { (QPSK_ALPHAS.to_vec(), grid(40)) } else { (QAM16_ALPHAS.to_vec(), grid(50)) };
    Some(ScenarioPreset { name, constellation, gamma, alphas, snr_db, detector: Detector::Ml })
}

pub const PRESET_NAMES: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];
