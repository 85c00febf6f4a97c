//! Base signal alphabets and bit labeling.
//!
//! Points are stored in label order: `points()[label]` is the symbol whose
//! bit label is the binary expansion of `label` (MSB first). Square QAM
//! alphabets use per-axis Gray coding with the in-phase bits ahead of the
//! quadrature bits.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest alphabet accepted; detectors keep per-symbol scratch on the stack.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: u32,
    avg_energy: f64,
    min_distance: f64,
}

impl Constellation {
    /// Builds a constellation from points listed in label order.
    pub fn from_points(name: impl Into<String>, points: Vec<Complex64>) -> Result<Self> {
        let size = points.len();
        if size < 2 {
            return Err(Error::TooFewPoints(size));
        }
        if !size.is_power_of_two() || size > MAX_POINTS {
            return Err(Error::InvalidConstellation(format!(
                "size {size} must be a power of two no larger than {MAX_POINTS}"
            )));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidConstellation("non-finite point".into()));
        }
        let min_distance = pairwise_min_distance(&points)?;
        if min_distance == 0.0 {
            return Err(Error::InvalidConstellation("duplicate points".into()));
        }
        let avg_energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / size as f64;
        Ok(Self { name: name.into(), bits_per_symbol: size.trailing_zeros(), points, avg_energy, min_distance })
    }

    /// QPSK on the {±1}² grid, unit average energy.
    pub fn qpsk() -> Self {
        Self::qpsk_unnormalized().normalized()
    }

    /// QPSK on the raw {±1}² grid (average energy 2, minimum distance 2).
    pub fn qpsk_unnormalized() -> Self {
        square_qam("qpsk", 1)
    }

    /// 16QAM on the {±1,±3}² grid, unit average energy.
    pub fn qam16() -> Self {
        Self::qam16_unnormalized().normalized()
    }

    /// 16QAM on the raw {±1,±3}² grid (average energy 10, minimum distance 2).
    pub fn qam16_unnormalized() -> Self {
        square_qam("16qam", 2)
    }

    /// Looks up a unit-energy alphabet by name (`qpsk`, `16qam`).
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "qpsk" | "4qam" => Ok(Self::qpsk()),
            "16qam" | "qam16" => Ok(Self::qam16()),
            _ => Err(Error::UnknownConstellation(name.to_string())),
        }
    }

    /// Returns a copy scaled to unit average energy.
    pub fn normalized(&self) -> Self {
        let scale = self.avg_energy.sqrt().recip();
        let points: Vec<_> = self.points.iter().map(|p| p * scale).collect();
        let avg_energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        Self {
            name: self.name.clone(),
            points,
            bits_per_symbol: self.bits_per_symbol,
            avg_energy,
            min_distance: self.min_distance * scale,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn avg_energy(&self) -> f64 {
        self.avg_energy
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    /// Maps a bit sequence (values 0/1, MSB first per symbol) to symbols.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol as usize;
        if !bits.len().is_multiple_of(k) {
            return Err(Error::BitLength { len: bits.len(), bits_per_symbol: self.bits_per_symbol });
        }
        bits.chunks(k)
            .map(|group| {
                group.iter().try_fold(0usize, |acc, &b| match b {
                    0 | 1 => Ok((acc << 1) | b as usize),
                    other => Err(Error::NotABit(other)),
                })
            })
            .map(|label| label.map(|l| self.points[l]))
            .collect()
    }

    /// Label index of a symbol that is exactly a constellation point.
    pub fn label_of(&self, symbol: Complex64) -> Result<usize> {
        self.points.iter().position(|&p| p == symbol).ok_or(Error::NotAPoint(symbol))
    }

    /// Inverse of [`map_bits`](Self::map_bits) for one symbol.
    pub fn demap(&self, symbol: Complex64) -> Result<Vec<u8>> {
        let label = self.label_of(symbol)?;
        Ok(self.label_bits(label))
    }

    /// Bits of a label, MSB first.
    pub fn label_bits(&self, label: usize) -> Vec<u8> {
        let k = self.bits_per_symbol;
        (0..k).rev().map(|i| ((label >> i) & 1) as u8).collect()
    }
}

pub fn make_qpsk() -> Constellation {
    Constellation::qpsk()
}

pub fn make_16qam() -> Constellation {
    Constellation::qam16()
}

/// Smallest distance over all unordered pairs; 0 when any two points coincide.
pub fn pairwise_min_distance(points: &[Complex64]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min((p - q).norm_sqr());
        }
    }
    Ok(best.sqrt())
}

/// Gray-coded PAM amplitude for a `bits`-wide axis label.
fn gray_pam_level(label: usize, bits: u32) -> f64 {
    let mut position = label;
    let mut shift = label >> 1;
    while shift != 0 {
        position ^= shift;
        shift >>= 1;
    }
    let levels = 1usize << bits;
    (2 * position) as f64 - (levels - 1) as f64
}

fn square_qam(name: &str, bits_per_axis: u32) -> Constellation {
    let per_axis = 1usize << bits_per_axis;
    let mask = per_axis - 1;
    let points = (0..per_axis * per_axis)
        .map(|label| {
            let i_bits = label >> bits_per_axis;
            let q_bits = label & mask;
            Complex64::new(gray_pam_level(i_bits, bits_per_axis), gray_pam_level(q_bits, bits_per_axis))
        })
        .collect();
    Constellation::from_points(name, points).expect("square QAM grid is valid")
}
