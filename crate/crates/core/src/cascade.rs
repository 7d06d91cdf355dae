//! Four-weight multiplicative cascades on dyadic quadrants.
//!
//! A cascade starts from one unit cell and splits every cell into four
//! quadrants carrying `parent × p_i`. Its mass exponents are known in closed
//! form, which makes it the reference fixture for every estimator here.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::{MeasureGrid, MeasureKind};

pub const DEFAULT_SIDE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    /// Quadrant weights in NW, NE, SW, SE order.
    pub weights: [f64; 4],
    pub depth: u32,
    /// Draw a fresh weight-to-quadrant permutation for every split cell.
    pub shuffle: bool,
    pub seed: u64,
}

impl CascadeSpec {
    pub fn new(weights: [f64; 4], depth: u32) -> Self {
        Self {
            weights,
            depth,
            shuffle: false,
            seed: 0,
        }
    }

    pub fn shuffled(mut self, seed: u64) -> Self {
        self.shuffle = true;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_weights(&self.weights)?;
        if self.depth == 0 {
            return Err(Error::InvalidCascade("depth must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn validate_weights(w: &[f64; 4]) -> Result<()> {
    if w.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::InvalidCascade(format!(
            "weights must lie in (0, 1), got {w:?}"
        )));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidCascade(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

pub fn generate_cascade(spec: &CascadeSpec) -> Result<MeasureGrid> {
    generate_cascade_capped(spec, DEFAULT_SIDE_CAP)
}

pub fn generate_cascade_capped(spec: &CascadeSpec, side_cap: usize) -> Result<MeasureGrid> {
    spec.validate()?;
    let too_large = || Error::DepthTooLarge {
        depth: spec.depth,
        side: 1u64.checked_shl(spec.depth).unwrap_or(u64::MAX),
        cap: side_cap,
    };
    if spec.depth >= usize::BITS - 1 {
        return Err(too_large());
    }
    let final_side = 1usize << spec.depth;
    if final_side > side_cap {
        return Err(too_large());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order = [0usize, 1, 2, 3];
    let mut side = 1usize;
    let mut grid = vec![1.0f64];
    for _ in 0..spec.depth {
        let next_side = side * 2;
        let mut next = vec![0.0; next_side * next_side];
        for r in 0..side {
            for c in 0..side {
                let parent = grid[r * side + c];
                if spec.shuffle {
                    order.shuffle(&mut rng);
                }
                let (r2, c2) = (2 * r, 2 * c);
                next[r2 * next_side + c2] = parent * spec.weights[order[0]];
                next[r2 * next_side + c2 + 1] = parent * spec.weights[order[1]];
                next[(r2 + 1) * next_side + c2] = parent * spec.weights[order[2]];
                next[(r2 + 1) * next_side + c2 + 1] = parent * spec.weights[order[3]];
            }
        }
        grid = next;
        side = next_side;
    }
    MeasureGrid::from_values(side, grid, MeasureKind::Sum)
}

/// Closed-form mass exponents of a cascade on a q grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum {
    pub q_grid: Vec<f64>,
    pub tau: Vec<f64>,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    pub d: Vec<f64>,
}

/// τ(q) = −log₂ Σ pᵢ^q, α(q) = −Σ pᵢ^q ln pᵢ / (Σ pᵢ^q · ln 2),
/// f = qα − τ, D(q) = τ/(q−1) with D(1) = α(1).
pub fn analytic_tau_spectrum(weights: &[f64; 4], q_grid: &[f64]) -> Result<AnalyticSpectrum> {
    validate_weights(weights)?;
    if q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::InvalidQGrid("q values must be finite".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut out = AnalyticSpectrum {
        q_grid: q_grid.to_vec(),
        tau: Vec::with_capacity(q_grid.len()),
        alpha: Vec::with_capacity(q_grid.len()),
        f: Vec::with_capacity(q_grid.len()),
        d: Vec::with_capacity(q_grid.len()),
    };
    for &q in q_grid {
        let (tau, alpha) = if q == 1.0 {
            let a = -weights.iter().map(|p| p * p.ln()).sum::<f64>() / ln2;
            (0.0, a)
        } else {
            let pw: Vec<f64> = weights.iter().map(|p| p.powf(q)).collect();
            let s: f64 = pw.iter().sum();
            let a = -pw.iter().zip(weights).map(|(w, p)| w * p.ln()).sum::<f64>() / (s * ln2);
            (-s.log2(), a)
        };
        out.tau.push(tau);
        out.alpha.push(alpha);
        out.f.push(q * alpha - tau);
        out.d.push(if q == 1.0 { alpha } else { tau / (q - 1.0) });
    }
    Ok(out)
}
