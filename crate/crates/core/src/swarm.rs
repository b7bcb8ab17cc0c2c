//! Swarm state and the bookkeeping shared by every update rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::vecmath::dist_sq;

/// One search agent: current position and velocity plus its personal-best
/// record. `best_raw` is the cached objective value at `best_position` and
/// is never stale after [`update_bests`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_raw: f64,
}

/// Whole-swarm state. Minimization is the library-wide convention:
/// `global_best_raw` is the minimum of the particles' `best_raw` values and
/// `global_best_position` the position achieving it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best_raw: f64,
    pub iteration: u64,
}

impl SwarmState {
    pub fn dim(&self) -> usize {
        self.particles.first().map_or(0, |p| p.position.len())
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Raw fitness of each particle's current personal best.
    pub fn best_raws(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.best_raw).collect()
    }
}

/// Which particles improved during an [`update_bests`] pass.
#[derive(Debug, Clone, Default)]
pub struct BestUpdate {
    pub improved: Vec<usize>,
    pub gbest_changed: bool,
    /// Particle now holding the global best, when it changed.
    pub gbest_particle: Option<usize>,
}

/// Uniformly initialized swarm: positions drawn inside the objective's
/// bounds (particle-major, dimension-minor draw order), zero velocities,
/// personal bests at the initial positions, global best computed from the
/// initial evaluations.
pub fn init_swarm(n: usize, objective: &Objective, rng: &mut RngStream) -> Result<SwarmState> {
    if n == 0 {
        return Err(Error::InvalidParameter("particle count must be >= 1".into()));
    }
    let mut particles = Vec::with_capacity(n);
    for i in 0..n {
        let position = objective.bounds.sample_uniform(rng);
        let raw = objective.noisy_eval(&position, rng)?;
        if raw.is_nan() {
            return Err(Error::NonFiniteFitness { particle: i, value: raw });
        }
        particles.push(Particle {
            best_position: position.clone(),
            velocity: vec![0.0; position.len()],
            position,
            best_raw: raw,
        });
    }
    let (mut gbest_idx, mut gbest_raw) = (0, particles[0].best_raw);
    for (i, p) in particles.iter().enumerate().skip(1) {
        if p.best_raw < gbest_raw {
            gbest_raw = p.best_raw;
            gbest_idx = i;
        }
    }
    Ok(SwarmState {
        global_best_position: particles[gbest_idx].best_position.clone(),
        global_best_raw: gbest_raw,
        particles,
        iteration: 0,
    })
}

/// Fold fresh evaluations into the personal and global bests.
///
/// A personal best moves only on strict improvement, so ties keep the
/// earlier record; the global best likewise, which keeps it stable under
/// later equal-valued discoveries.
pub fn update_bests(state: &mut SwarmState, evaluations: &[(usize, f64)]) -> Result<BestUpdate> {
    let mut update = BestUpdate::default();
    for &(i, raw) in evaluations {
        if raw.is_nan() {
            return Err(Error::NonFiniteFitness { particle: i, value: raw });
        }
        let p = state
            .particles
            .get_mut(i)
            .ok_or_else(|| Error::InvalidParameter(format!("particle id {i} out of range")))?;
        if raw < p.best_raw {
            p.best_raw = raw;
            p.best_position.copy_from_slice(&p.position);
            update.improved.push(i);
        }
    }
    for &i in &update.improved {
        let p = &state.particles[i];
        if p.best_raw < state.global_best_raw {
            state.global_best_raw = p.best_raw;
            state.global_best_position.copy_from_slice(&p.best_position);
            update.gbest_changed = true;
            update.gbest_particle = Some(i);
        }
    }
    Ok(update)
}

/// Swarm-collapse stop rule: true when the mean normalized squared
/// distance of the particles from the global best,
/// `(1 / (dim * n)) * sum_r ||x_r - x^g||^2`, falls below `threshold`.
pub fn stop_check(state: &SwarmState, threshold: f64) -> bool {
    let n = state.len();
    if n == 0 {
        return false;
    }
    let spread: f64 = state
        .particles
        .iter()
        .map(|p| dist_sq(&p.position, &state.global_best_position))
        .sum();
    spread / (state.dim() as f64 * n as f64) < threshold
}

/// Evaluate every particle at its current position, fold the results into
/// the bests, and return the raw values. Shared tail of all step rules.
pub(crate) fn evaluate_and_update(
    state: &mut SwarmState,
    objective: &Objective,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, BestUpdate)> {
    let mut raws = Vec::with_capacity(state.len());
    for p in &state.particles {
        raws.push(objective.noisy_eval(&p.position, rng)?);
    }
    let evals: Vec<(usize, f64)> = raws.iter().copied().enumerate().collect();
    let update = update_bests(state, &evals)?;
    Ok((raws, update))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ObjectiveId;

    #[test]
    fn degenerate_point_domain_sits_at_the_point() {
        let mut obj = Objective::with_dim(ObjectiveId::Sphere, 3);
        obj.bounds = crate::bounds::Bounds::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let mut rng = RngStream::new(5);
        let state = init_swarm(1, &obj, &mut rng).unwrap();
        assert_eq!(state.particles[0].position, vec![0.0; 3]);
        assert_eq!(state.global_best_position, vec![0.0; 3]);
        assert_eq!(state.global_best_raw, 0.0);
    }

    #[test]
    fn init_positions_are_within_bounds() {
        let obj = Objective::new(ObjectiveId::Sphere);
        let mut rng = RngStream::new(42);
        let state = init_swarm(100, &obj, &mut rng).unwrap();
        assert_eq!(state.len(), 100);
        for p in &state.particles {
            assert_eq!(p.position.len(), 10);
            assert!(p.position.iter().all(|x| (-100.0..=100.0).contains(x)));
            assert!(p.velocity.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let obj = Objective::new(ObjectiveId::Rastrigin);
        let a = init_swarm(20, &obj, &mut RngStream::new(7)).unwrap();
        let b = init_swarm(20, &obj, &mut RngStream::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tie_keeps_earlier_best() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(3);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        let before = state.particles[0].clone();
        let raw = before.best_raw;
        // equal fitness at a different position must not move the best
        state.particles[0].position = vec![before.position[0] + 1.0];
        let update = update_bests(&mut state, &[(0, raw)]).unwrap();
        assert!(update.improved.is_empty());
        assert_eq!(state.particles[0].best_position, before.best_position);
    }

    #[test]
    fn improvement_moves_pbest_and_gbest() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(3);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![0.1, 0.1];
        let update = update_bests(&mut state, &[(0, 0.02)]).unwrap();
        assert_eq!(update.improved, vec![0]);
        assert!(update.gbest_changed);
        assert_eq!(state.global_best_raw, 0.02);
        assert_eq!(state.global_best_position, vec![0.1, 0.1]);
    }

    #[test]
    fn gbest_is_argmin_over_fresh_init() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(8);
        let mut state = init_swarm(3, &obj, &mut rng).unwrap();
        // force a known configuration, then re-evaluate
        state.global_best_raw = f64::INFINITY;
        for (p, x) in state.particles.iter_mut().zip([5.0, 2.0, 7.0]) {
            p.position = vec![x];
            p.best_raw = f64::INFINITY;
        }
        update_bests(&mut state, &[(0, 5.0), (1, 2.0), (2, 7.0)]).unwrap();
        assert_eq!(state.global_best_raw, 2.0);
        assert_eq!(state.global_best_position, vec![2.0]);
    }

    #[test]
    fn stop_check_collapsed_swarm() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(3, &obj, &mut rng).unwrap();
        for p in &mut state.particles {
            p.position = state.global_best_position.clone();
        }
        assert!(stop_check(&state, 0.001));
    }

    #[test]
    fn stop_check_direct_value() {
        // two particles in 1-D at distance 1 and 0 from gbest:
        // (1 + 0) / (1 * 2) = 0.5, not below 0.001
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(2, &obj, &mut rng).unwrap();
        state.global_best_position = vec![0.0];
        state.particles[0].position = vec![1.0];
        state.particles[1].position = vec![0.0];
        assert!(!stop_check(&state, 0.001));
        assert!(stop_check(&state, 0.5 + 1e-9));
    }

    #[test]
    fn stop_check_vacuous_threshold() {
        let obj = Objective::new(ObjectiveId::Sphere);
        let mut rng = RngStream::new(4);
        let state = init_swarm(10, &obj, &mut rng).unwrap();
        assert!(stop_check(&state, 1e300));
    }

    #[test]
    fn stop_check_is_translation_invariant() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 3);
        let mut rng = RngStream::new(21);
        let state = init_swarm(5, &obj, &mut rng).unwrap();
        let mut shifted = state.clone();
        for p in &mut shifted.particles {
            for x in &mut p.position {
                *x += 17.25;
            }
        }
        for x in &mut shifted.global_best_position {
            *x += 17.25;
        }
        for threshold in [1e-6, 1e-3, 1.0, 1e3] {
            assert_eq!(stop_check(&state, threshold), stop_check(&shifted, threshold));
        }
    }
}
