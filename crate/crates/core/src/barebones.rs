//! Bare bones updates: velocity-free, each next position sampled from a
//! per-particle Gaussian defined by the personal and global bests.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{evaluate_and_update, Particle, SwarmState};
use crate::vecmath::norm;

/// Covariance choice for the per-particle sampling distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovMode {
    /// Diagonal entries `|pbest_j - gbest_j|` per dimension.
    PerDimension,
    /// All diagonal entries `0.5 * ||pbest - gbest||`.
    Scalar,
}

impl std::str::FromStr for CovMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_dimension" => Ok(CovMode::PerDimension),
            "scalar" => Ok(CovMode::Scalar),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "unknown covariance mode `{other}` (expected per_dimension or scalar)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareBonesParams {
    pub cov_mode: CovMode,
    /// Covariance multiplier; 1 is the plain rule, 1/5 the narrowed
    /// variant used in the benchmark protocol.
    pub scale: f64,
}

impl Default for BareBonesParams {
    fn default() -> Self {
        Self {
            cov_mode: CovMode::PerDimension,
            scale: 1.0,
        }
    }
}

/// Mean and covariance diagonal of one particle's sampling distribution:
/// mean `(pbest + gbest) / 2`, covariance per [`CovMode`] times `scale`.
pub fn barebones_distribution(
    particle: &Particle,
    gbest: &[f64],
    params: &BareBonesParams,
) -> (Vec<f64>, Vec<f64>) {
    let pb = &particle.best_position;
    let mean: Vec<f64> = pb.iter().zip(gbest).map(|(b, g)| 0.5 * (b + g)).collect();
    let cov = match params.cov_mode {
        CovMode::PerDimension => pb
            .iter()
            .zip(gbest)
            .map(|(b, g)| params.scale * (b - g).abs())
            .collect(),
        CovMode::Scalar => {
            let diff: Vec<f64> = pb.iter().zip(gbest).map(|(b, g)| b - g).collect();
            vec![params.scale * 0.5 * norm(&diff); pb.len()]
        }
    };
    (mean, cov)
}

/// Replace every position with an independent Gaussian sample from that
/// particle's distribution. Zero-variance dimensions copy the mean
/// exactly, so a particle whose bests coincide is reproduced bit-for-bit.
pub fn step_barebones(
    state: &mut SwarmState,
    objective: &Objective,
    params: &BareBonesParams,
    rng: &mut RngStream,
) -> Result<()> {
    let gbest = state.global_best_position.clone();
    for p in &mut state.particles {
        let (mean, cov) = barebones_distribution(p, &gbest, params);
        for (k, (m, c)) in mean.iter().zip(&cov).enumerate() {
            let z = rng.next_gaussian();
            p.position[k] = if *c > 0.0 { m + c.sqrt() * z } else { *m };
        }
        objective.bounds.clamp_in_place(&mut p.position);
    }
    state.iteration += 1;
    evaluate_and_update(state, objective, rng)?;
    Ok(())
}

/// Log-density (up to its normalizing constant) of the Gaussian the
/// Bayesian reading assigns to one bare bones particle: centered at
/// `(pbest + gbest) / 2` with precision `1 / ||pbest - gbest||`.
///
/// Degenerates to a Dirac delta when the bests coincide: zero at the
/// center, negative infinity elsewhere.
pub fn posterior_log_density(pbest: &[f64], gbest: &[f64], x: &[f64]) -> f64 {
    let diff: Vec<f64> = pbest.iter().zip(gbest).map(|(b, g)| b - g).collect();
    let spread = norm(&diff);
    let center: Vec<f64> = pbest.iter().zip(gbest).map(|(b, g)| 0.5 * (b + g)).collect();
    let d2 = crate::vecmath::dist_sq(x, &center);
    if spread == 0.0 {
        return if d2 == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -d2 / (2.0 * spread)
}
