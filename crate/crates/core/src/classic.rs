//! Standard and constricted particle swarm updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{evaluate_and_update, SwarmState};

/// Parameters of the velocity-based update rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicParams {
    /// Inertia weight `w`.
    pub w: f64,
    /// Personal attraction `phi`.
    pub phi: f64,
    /// Global attraction `eta`.
    pub eta: f64,
    /// Multiply the whole velocity expression by the constriction
    /// coefficient (requires `phi + eta > 4`).
    pub use_constriction: bool,
    /// Alternative form: use the constriction coefficient in place of the
    /// inertia weight instead of as an outer factor.
    pub chi_as_inertia: bool,
}

impl ClassicParams {
    /// Literature defaults for the plain velocity update.
    pub fn standard() -> Self {
        Self {
            w: 0.7298,
            phi: 1.49618,
            eta: 1.49618,
            use_constriction: false,
            chi_as_inertia: false,
        }
    }

    /// Canonical constricted configuration (`phi = eta = 2.05`).
    pub fn constricted() -> Self {
        Self {
            w: 1.0,
            phi: 2.05,
            eta: 2.05,
            use_constriction: true,
            chi_as_inertia: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.w < 0.0 || self.phi < 0.0 || self.eta < 0.0 {
            return Err(Error::InvalidParameter(
                "w, phi and eta must be non-negative".into(),
            ));
        }
        if (self.use_constriction || self.chi_as_inertia) && self.phi + self.eta <= 4.0 {
            return Err(Error::ConstrictionDomain {
                sum: self.phi + self.eta,
            });
        }
        Ok(())
    }
}

impl Default for ClassicParams {
    fn default() -> Self {
        Self::standard()
    }
}

/// Clerc–Kennedy constriction coefficient
/// `chi = 2 / |2 - s - sqrt(s^2 - 4 s)|` with `s = phi + eta > 4`.
pub fn constriction_coefficient(phi: f64, eta: f64) -> Result<f64> {
    let s = phi + eta;
    if s <= 4.0 {
        return Err(Error::ConstrictionDomain { sum: s });
    }
    Ok(2.0 / (2.0 - s - (s * s - 4.0 * s).sqrt()).abs())
}

/// One particle's velocity update with explicit per-dimension draws.
///
/// `chi` is an outer multiplier (1.0 for the plain rule); `inertia` the
/// factor on the previous velocity. Exposed so tests can force the draws.
pub fn velocity_update(
    velocity: &[f64],
    position: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    params: &ClassicParams,
    chi: f64,
    inertia: f64,
    r_phi: &[f64],
    r_eta: &[f64],
) -> Vec<f64> {
    (0..velocity.len())
        .map(|k| {
            chi * (inertia * velocity[k]
                + params.phi * r_phi[k] * (pbest[k] - position[k])
                + params.eta * r_eta[k] * (gbest[k] - position[k]))
        })
        .collect()
}

fn step(state: &mut SwarmState, objective: &Objective, params: &ClassicParams, rng: &mut RngStream) -> Result<()> {
    params.validate()?;
    let (chi, inertia) = if params.chi_as_inertia {
        (1.0, constriction_coefficient(params.phi, params.eta)?)
    } else if params.use_constriction {
        (constriction_coefficient(params.phi, params.eta)?, params.w)
    } else {
        (1.0, params.w)
    };
    let dim = state.dim();
    let gbest = state.global_best_position.clone();
    let mut r_phi = vec![0.0; dim];
    let mut r_eta = vec![0.0; dim];
    for p in &mut state.particles {
        for k in 0..dim {
            r_phi[k] = rng.next_uniform();
            r_eta[k] = rng.next_uniform();
        }
        p.velocity = velocity_update(
            &p.velocity,
            &p.position,
            &p.best_position,
            &gbest,
            params,
            chi,
            inertia,
            &r_phi,
            &r_eta,
        );
        for k in 0..dim {
            p.position[k] += p.velocity[k];
        }
        objective.bounds.clamp_in_place(&mut p.position);
    }
    state.iteration += 1;
    evaluate_and_update(state, objective, rng)?;
    Ok(())
}

/// Plain velocity update: inertia plus stochastic pulls toward the
/// personal and global bests, then synchronous move, clamp, re-evaluation.
pub fn step_standard(
    state: &mut SwarmState,
    objective: &Objective,
    params: &ClassicParams,
    rng: &mut RngStream,
) -> Result<()> {
    let p = ClassicParams {
        use_constriction: false,
        chi_as_inertia: false,
        ..*params
    };
    step(state, objective, &p, rng)
}

/// Constricted update: the whole velocity expression scaled by the
/// Clerc–Kennedy coefficient (or used as inertia when `chi_as_inertia`).
pub fn step_constricted(
    state: &mut SwarmState,
    objective: &Objective,
    params: &ClassicParams,
    rng: &mut RngStream,
) -> Result<()> {
    if params.chi_as_inertia {
        step(state, objective, params, rng)
    } else {
        let p = ClassicParams {
            use_constriction: true,
            ..*params
        };
        step(state, objective, &p, rng)
    }
}
