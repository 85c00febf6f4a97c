//! Composite constellation √α·x₁ + √(1−α)·x₂ and its minimum-distance analysis.

use num_complex::Complex64;

use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// Two composite points closer than this (on the unit-energy scale) coincide.
pub const COINCIDENCE_TOL: f64 = 1e-9;

const GRID_STEP: f64 = 1e-4;
const REFINE_TOL: f64 = 1e-8;

/// Power imbalance factor α: share of the transmit power given to user 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.5..1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// Amplitude √α applied to the user-1 symbol.
    pub fn user1_gain(self) -> f64 {
        self.0.sqrt()
    }

    /// Amplitude √(1−α) applied to the user-2 symbol.
    pub fn user2_gain(self) -> f64 {
        (1.0 - self.0).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SuperposedConstellation {
    pub split: PowerSplit,
    pub base: Constellation,
    /// Indexed by `x1 * M + x2`.
    pub composite_points: Vec<Complex64>,
    pub pair_labels: Vec<(usize, usize)>,
    /// Groups of two or more pairs whose composite points coincide.
    pub coincidence_classes: Vec<Vec<(usize, usize)>>,
    pub d_min: f64,
}

impl SuperposedConstellation {
    /// Number of distinct composite points.
    pub fn distinct_points(&self) -> usize {
        self.composite_points.len() - self.coincidence_classes.iter().map(|class| class.len() - 1).sum::<usize>()
    }

    /// Number of pairs that share their composite point with another pair.
    pub fn coincident_pairs(&self) -> usize {
        self.coincidence_classes.iter().map(Vec::len).sum()
    }
}

fn tolerance(base: &Constellation) -> f64 {
    COINCIDENCE_TOL * base.avg_energy().sqrt()
}

fn composite(base: &Constellation, split: PowerSplit) -> Vec<Complex64> {
    let (g1, g2) = (split.user1_gain(), split.user2_gain());
    let pts = base.points();
    pts.iter().flat_map(|&x1| pts.iter().map(move |&x2| x1 * g1 + x2 * g2)).collect()
}

/// Enumerates all M² composite points with their source pairs and coincidences.
pub fn compose(base: &Constellation, split: PowerSplit) -> SuperposedConstellation {
    let m = base.size();
    let points = composite(base, split);
    let tol = tolerance(base);
    let n = points.len();

    // Union-find over pairs closer than the tolerance.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut d_min = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = (points[i] - points[j]).norm();
            if d < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            } else {
                d_min = d_min.min(d);
            }
        }
    }

    let mut classes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        classes[root].push((i / m, i % m));
    }
    let coincidence_classes: Vec<_> = classes.into_iter().filter(|c| c.len() > 1).collect();
    if !coincidence_classes.is_empty() {
        d_min = 0.0;
    }

    SuperposedConstellation {
        split,
        base: base.clone(),
        pair_labels: (0..n).map(|i| (i / m, i % m)).collect(),
        composite_points: points,
        coincidence_classes,
        d_min,
    }
}

/// Minimum distance of the composite alphabet by exhaustive enumeration; 0 on
/// any coincidence. Same value as `compose(..).d_min` without building classes.
pub fn dmin_general(base: &Constellation, alpha: f64) -> Result<f64> {
    let split = PowerSplit::new(alpha)?;
    Ok(composite_min_distance(base, split))
}

fn composite_min_distance(base: &Constellation, split: PowerSplit) -> f64 {
    let points = composite(base, split);
    let tol = tolerance(base);
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min((p - q).norm_sqr());
        }
    }
    let d = best.sqrt();
    if d < tol {
        0.0
    } else {
        d
    }
}

/// Closed-form minimum distance for the raw {±1}² QPSK alphabet:
/// `min(2√(1−α), 2(√α − √(1−α)))`.
pub fn dmin_qpsk(alpha: f64) -> Result<f64> {
    let split = PowerSplit::new(alpha)?;
    let (s1, s2) = (split.user1_gain(), split.user2_gain());
    Ok(clamp_coincident((2.0 * s2).min(2.0 * (s1 - s2)), 2.0))
}

/// Closed-form minimum distance for the raw {±1,±3}² 16QAM alphabet:
/// `min(2√(1−α), 2(√α − 3√(1−α)))`, floored at 0.
///
/// The outer/inner spacing argument behind this formula assumes the four
/// user-2 sub-constellations do not overlap, which holds for α ≥ 0.9. Below
/// that the composite points interleave and the true minimum distance (see
/// [`dmin_general`]) is generally positive even though this returns 0.
pub fn dmin_16qam(alpha: f64) -> Result<f64> {
    let split = PowerSplit::new(alpha)?;
    let (s1, s2) = (split.user1_gain(), split.user2_gain());
    Ok(clamp_coincident((2.0 * s2).min(2.0 * (s1 - 3.0 * s2)), 10.0))
}

fn clamp_coincident(d: f64, avg_energy: f64) -> f64 {
    if d < COINCIDENCE_TOL * avg_energy.sqrt() {
        0.0
    } else {
        d
    }
}

/// α maximizing the composite minimum distance. QPSK and 16QAM use the closed
/// form (0.8 and 16/17); other alphabets fall back to [`optimal_alpha_numeric`].
pub fn optimal_alpha(base: &Constellation) -> f64 {
    match base.name() {
        "qpsk" if base.size() == 4 => 0.8,
        "16qam" if base.size() == 16 => 16.0 / 17.0,
        _ => optimal_alpha_numeric(base),
    }
}

/// Grid search over α ∈ [0.5, 1) with step 1e−4, then golden-section
/// refinement around the best grid point down to a 1e−8 bracket.
pub fn optimal_alpha_numeric(base: &Constellation) -> f64 {
    let f = |alpha: f64| composite_min_distance(base, PowerSplit(alpha));
    let steps = ((1.0 - 0.5) / GRID_STEP).round() as usize;
    let (mut best_alpha, mut best_d) = (0.5, f(0.5));
    for k in 1..steps {
        let alpha = 0.5 + k as f64 * GRID_STEP;
        let d = f(alpha);
        if d > best_d {
            best_alpha = alpha;
            best_d = d;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (best_alpha - GRID_STEP).max(0.5);
    let mut hi = (best_alpha + GRID_STEP).min(1.0 - 1e-12);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > REFINE_TOL {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let refined = 0.5 * (lo + hi);
    if f(refined) >= best_d {
        refined
    } else {
        best_alpha
    }
}
