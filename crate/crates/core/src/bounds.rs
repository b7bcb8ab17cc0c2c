//! Search domain handling: axis-aligned boxes with clamping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Axis-aligned box domain, one `[lower, upper]` interval per dimension.
///
/// Degenerate intervals (`lower == upper`) are allowed so point domains can
/// be expressed; `lower > upper` is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidBounds(format!(
                "lower has {} dimensions, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidBounds("zero-dimensional domain".into()));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBounds(format!(
                    "non-finite bound in dimension {k}"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidBounds(format!(
                    "lower {lo} > upper {hi} in dimension {k}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[-half_width, half_width]` in every dimension.
    pub fn symmetric(half_width: f64, dim: usize) -> Self {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
            .expect("symmetric bounds are always valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Clip each component into its interval; in-bounds input is unchanged.
    pub fn clamp_in_place(&self, position: &mut [f64]) {
        debug_assert_eq!(position.len(), self.dim());
        for (x, (lo, hi)) in position.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *x = x.clamp(*lo, *hi);
        }
    }

    /// Uniform draw inside the box, one uniform per dimension.
    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| rng.uniform_in(*lo, *hi))
            .collect()
    }
}

/// Clipped copy of `position`; components already inside are returned unchanged.
pub fn clamp_to_bounds(position: &[f64], bounds: &Bounds) -> Vec<f64> {
    let mut out = position.to_vec();
    bounds.clamp_in_place(&mut out);
    out
}
