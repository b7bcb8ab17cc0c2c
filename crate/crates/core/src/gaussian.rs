//! The Bayesian core: log posterior over optimum locations, its analytic
//! gradient under the dependence and independence assumptions, and the
//! gradient-ascent position updates built on them.
//!
//! Component densities are unit-constant Gaussians
//! `G(x; c) = exp(-beta/2 ||x - c||^2)`; normalizing constants never enter
//! because every update uses only gradients of the log posterior. The
//! dependence-form mixtures are evaluated in the log domain with max-shift
//! exponentiation so they survive benchmark-scale distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{fitness_weight, FitnessWeightSpec};
use crate::history::PosteriorHistory;
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{evaluate_and_update, BestUpdate, SwarmState};
use crate::vecmath::{dist_sq, norm_sq};

/// Prior over optimum locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prior {
    /// Unit Gaussian centered at the origin; contributes `-x` to the
    /// gradient and the `(1 - gamma)` contraction to the updates.
    GaussianUnit,
    /// Flat prior; contributes nothing.
    Uniform,
}

impl std::str::FromStr for Prior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_unit" => Ok(Prior::GaussianUnit),
            "uniform" => Ok(Prior::Uniform),
            other => Err(Error::InvalidParameter(format!(
                "unknown prior `{other}` (expected gaussian_unit or uniform)"
            ))),
        }
    }
}

/// How one iteration's evaluations combine into the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    /// Fitness-weighted mixture of component densities.
    Dependence,
    /// Fitness-weight-exponentiated product of component densities.
    Independence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    /// Gradient-ascent learning constant, in `(0, 1]`.
    pub gamma: f64,
    /// Component Gaussian width.
    pub beta: f64,
    pub prior: Prior,
    pub assumption: Assumption,
    /// Iterations of history retained.
    pub window: usize,
    /// Temporal discount for the discounted variants, in `(0, 1)`.
    pub tau: f64,
}

impl GaussianParams {
    /// Benchmark defaults for the dependence form.
    pub fn dependence() -> Self {
        Self {
            gamma: 0.8,
            beta: 0.4,
            prior: Prior::Uniform,
            assumption: Assumption::Dependence,
            window: 100,
            tau: 0.5,
        }
    }

    /// Benchmark defaults for the independence form.
    pub fn independence() -> Self {
        Self {
            beta: 0.1,
            assumption: Assumption::Independence,
            ..Self::dependence()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidParameter("window must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self::dependence()
    }
}

/// Log of the unit-constant component density, `-beta/2 ||x - center||^2`.
pub fn component_log_density(beta: f64, x: &[f64], center: &[f64]) -> f64 {
    -0.5 * beta * dist_sq(x, center)
}

fn prior_log_density(prior: Prior, x: &[f64]) -> f64 {
    match prior {
        Prior::GaussianUnit => -0.5 * norm_sq(x),
        Prior::Uniform => 0.0,
    }
}

fn add_prior_grad(prior: Prior, x: &[f64], grad: &mut [f64]) {
    if prior == Prior::GaussianUnit {
        for (g, xi) in grad.iter_mut().zip(x) {
            *g -= xi;
        }
    }
}

/// Log posterior at `x`, up to an additive constant.
pub fn log_posterior(x: &[f64], history: &PosteriorHistory, params: &GaussianParams) -> Result<f64> {
    params.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut total = prior_log_density(params.prior, x);
    for group in history.groups() {
        match params.assumption {
            Assumption::Dependence => {
                // ln( sum_i w_i G_i / sum_i w_i ), max-shifted
                let logs: Vec<f64> = group
                    .positions
                    .iter()
                    .zip(&group.weights)
                    .map(|(c, w)| w.ln() + component_log_density(params.beta, x, c))
                    .collect();
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = logs.iter().map(|l| (l - m).exp()).sum();
                total += m + sum.ln() - group.weight_sum.ln();
            }
            Assumption::Independence => {
                // sum_i w_i ln G_i / sum_i w_i
                let acc: f64 = group
                    .positions
                    .iter()
                    .zip(&group.weights)
                    .map(|(c, w)| w * component_log_density(params.beta, x, c))
                    .sum();
                total += acc / group.weight_sum;
            }
        }
    }
    Ok(total)
}

/// Analytic gradient of [`log_posterior`] at `x`.
pub fn log_posterior_grad(
    x: &[f64],
    history: &PosteriorHistory,
    params: &GaussianParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut grad = vec![0.0; x.len()];
    add_prior_grad(params.prior, x, &mut grad);
    for group in history.groups() {
        match params.assumption {
            Assumption::Dependence => {
                let logs: Vec<f64> = group
                    .positions
                    .iter()
                    .zip(&group.weights)
                    .map(|(c, w)| w.ln() + component_log_density(params.beta, x, c))
                    .collect();
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut denom = 0.0;
                let mut pull = vec![0.0; x.len()];
                for (l, c) in logs.iter().zip(&group.positions) {
                    let s = (l - m).exp();
                    denom += s;
                    for (p, (ci, xi)) in pull.iter_mut().zip(c.iter().zip(x)) {
                        *p += s * (ci - xi);
                    }
                }
                for (g, p) in grad.iter_mut().zip(&pull) {
                    *g += params.beta * p / denom;
                }
            }
            Assumption::Independence => {
                // beta * (weighted mean - x), using the cached group mean
                for (g, (mi, xi)) in grad.iter_mut().zip(group.weighted_mean.iter().zip(x)) {
                    *g += params.beta * (mi - xi);
                }
            }
        }
    }
    Ok(grad)
}

fn push_current_evals(
    history: &mut PosteriorHistory,
    state: &SwarmState,
    raws: &[f64],
    weights: &FitnessWeightSpec,
) -> Result<()> {
    let positions: Vec<Vec<f64>> = state.particles.iter().map(|p| p.position.clone()).collect();
    let mut ws = Vec::with_capacity(raws.len());
    for r in raws {
        ws.push(fitness_weight(*r, weights)?);
    }
    history.push_iteration(state.iteration, positions, ws)
}

/// Seed a posterior history with a freshly initialized swarm's evaluations.
pub fn history_from_init(
    state: &SwarmState,
    weights: &FitnessWeightSpec,
    window: usize,
) -> Result<PosteriorHistory> {
    let mut history = PosteriorHistory::new(window);
    let raws = state.best_raws();
    push_current_evals(&mut history, state, &raws, weights)?;
    Ok(history)
}

/// Gradient-ascent step on the full windowed posterior: every particle
/// moves by `gamma` times the log-posterior gradient at its position, new
/// positions are clamped, evaluated, appended to the history, and folded
/// into the bests.
pub fn step_gaussian(
    state: &mut SwarmState,
    history: &mut PosteriorHistory,
    objective: &Objective,
    weights: &FitnessWeightSpec,
    params: &GaussianParams,
    rng: &mut RngStream,
) -> Result<()> {
    params.validate()?;
    let updated: Vec<Vec<f64>> = state
        .particles
        .iter()
        .map(|p| {
            let grad = log_posterior_grad(&p.position, history, params)?;
            let mut x = p.position.clone();
            for (xi, g) in x.iter_mut().zip(&grad) {
                *xi += params.gamma * g;
            }
            objective.bounds.clamp_in_place(&mut x);
            Ok(x)
        })
        .collect::<Result<_>>()?;
    for (p, x) in state.particles.iter_mut().zip(updated) {
        p.position = x;
    }
    state.iteration += 1;
    let (raws, _) = evaluate_and_update(state, objective, rng)?;
    push_current_evals(history, state, &raws, weights)?;
    Ok(())
}

/// Fully discounted variant: only the current iteration's evaluations
/// drive the update. Takes the current raw fitness values and returns the
/// fresh ones so a run can chain calls without re-evaluating.
pub fn step_current_only(
    state: &mut SwarmState,
    current_raws: &[f64],
    objective: &Objective,
    weights: &FitnessWeightSpec,
    params: &GaussianParams,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    params.validate()?;
    if current_raws.len() != state.len() {
        return Err(Error::InvalidParameter(
            "one current evaluation per particle is required".into(),
        ));
    }
    let mut ws = Vec::with_capacity(current_raws.len());
    for r in current_raws {
        ws.push(fitness_weight(*r, weights)?);
    }
    let positions: Vec<Vec<f64>> = state.particles.iter().map(|p| p.position.clone()).collect();
    let weight_sum: f64 = ws.iter().sum();

    let updated: Vec<Vec<f64>> = positions
        .iter()
        .map(|x| {
            let mut grad = vec![0.0; x.len()];
            add_prior_grad(params.prior, x, &mut grad);
            match params.assumption {
                Assumption::Dependence => {
                    let logs: Vec<f64> = positions
                        .iter()
                        .zip(&ws)
                        .map(|(c, w)| w.ln() + component_log_density(params.beta, x, c))
                        .collect();
                    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let denom: f64 = logs.iter().map(|l| (l - m).exp()).sum();
                    for (l, c) in logs.iter().zip(&positions) {
                        let s = (l - m).exp() / denom;
                        for (g, (ci, xi)) in grad.iter_mut().zip(c.iter().zip(x)) {
                            *g += params.beta * s * (ci - xi);
                        }
                    }
                }
                Assumption::Independence => {
                    for (c, w) in positions.iter().zip(&ws) {
                        let s = w / weight_sum;
                        for (g, (ci, xi)) in grad.iter_mut().zip(c.iter().zip(x)) {
                            *g += params.beta * s * (ci - xi);
                        }
                    }
                }
            }
            let mut out = x.clone();
            for (o, g) in out.iter_mut().zip(&grad) {
                *o += params.gamma * g;
            }
            objective.bounds.clamp_in_place(&mut out);
            out
        })
        .collect();
    for (p, x) in state.particles.iter_mut().zip(updated) {
        p.position = x;
    }
    state.iteration += 1;
    let (raws, _) = evaluate_and_update(state, objective, rng)?;
    Ok(raws)
}

/// Discounted-global-best variant: every particle is pulled toward the
/// full trace of past global bests with geometrically fading strength.
///
/// `gbest_trace` holds the global best after initialization and after each
/// completed step, oldest first; entry age counts from the end.
pub fn step_discounted_gbest(
    state: &mut SwarmState,
    gbest_trace: &[Vec<f64>],
    objective: &Objective,
    params: &GaussianParams,
    rng: &mut RngStream,
) -> Result<()> {
    params.validate()?;
    if gbest_trace.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let dim = state.dim();
    // sum of tau^age * g and of tau^age, newest first; stop once the
    // factor underflows to zero
    let mut weighted_sum = vec![0.0; dim];
    let mut coeff_sum = 0.0;
    let mut factor = 1.0;
    for g in gbest_trace.iter().rev() {
        if factor == 0.0 {
            break;
        }
        for (s, gi) in weighted_sum.iter_mut().zip(g) {
            *s += factor * gi;
        }
        coeff_sum += factor;
        factor *= params.tau;
    }
    for p in &mut state.particles {
        let mut grad = vec![0.0; dim];
        add_prior_grad(params.prior, &p.position, &mut grad);
        for ((g, s), xi) in grad.iter_mut().zip(&weighted_sum).zip(&p.position) {
            *g += params.beta * (s - coeff_sum * xi);
        }
        for (xi, g) in p.position.iter_mut().zip(&grad) {
            *xi += params.gamma * g;
        }
        objective.bounds.clamp_in_place(&mut p.position);
    }
    state.iteration += 1;
    evaluate_and_update(state, objective, rng)?;
    Ok(())
}

/// One recorded best-vector event: a position that became a new personal
/// best (and possibly the new global best) at some iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct BestEvent {
    pub iteration: u64,
    pub particle: usize,
    pub position: Vec<f64>,
    pub weight: f64,
    /// Whether this event set a new global best when it was recorded.
    pub new_gbest: bool,
}

/// Append-only log of best-vector events with pointers to the current
/// global best and each particle's current personal best.
#[derive(Debug, Clone)]
pub struct BestEventLog {
    events: Vec<BestEvent>,
    current_gbest: usize,
    current_pbest: Vec<usize>,
}

impl BestEventLog {
    /// Every initial position is its particle's first personal best; the
    /// initial global best is the first global-best event.
    pub fn from_init(state: &SwarmState, weights: &FitnessWeightSpec) -> Result<Self> {
        let mut events = Vec::with_capacity(state.len());
        let mut current_pbest = Vec::with_capacity(state.len());
        let mut gbest_idx = 0;
        for (i, p) in state.particles.iter().enumerate() {
            if p.best_raw == state.global_best_raw && state.global_best_position == p.best_position
            {
                gbest_idx = i;
            }
        }
        for (i, p) in state.particles.iter().enumerate() {
            current_pbest.push(events.len());
            events.push(BestEvent {
                iteration: state.iteration,
                particle: i,
                position: p.best_position.clone(),
                weight: fitness_weight(p.best_raw, weights)?,
                new_gbest: i == gbest_idx,
            });
        }
        Ok(Self {
            current_gbest: gbest_idx,
            events,
            current_pbest,
        })
    }

    /// Fold a completed iteration's improvements into the log.
    pub fn record_iteration(
        &mut self,
        state: &SwarmState,
        update: &BestUpdate,
        weights: &FitnessWeightSpec,
    ) -> Result<()> {
        for &i in &update.improved {
            let p = &state.particles[i];
            let idx = self.events.len();
            self.events.push(BestEvent {
                iteration: state.iteration,
                particle: i,
                position: p.best_position.clone(),
                weight: fitness_weight(p.best_raw, weights)?,
                new_gbest: update.gbest_particle == Some(i),
            });
            self.current_pbest[i] = idx;
        }
        if let Some(winner) = update.gbest_particle {
            self.current_gbest = self.current_pbest[winner];
        }
        Ok(())
    }

    pub fn events(&self) -> &[BestEvent] {
        &self.events
    }

    pub fn current_gbest_event(&self) -> &BestEvent {
        &self.events[self.current_gbest]
    }

    pub fn current_pbest_event(&self, particle: usize) -> &BestEvent {
        &self.events[self.current_pbest[particle]]
    }

    /// Events that contribute to particle `r`'s update: its own
    /// personal-best events plus every global-best event.
    fn relevant(&self, r: usize) -> impl Iterator<Item = (usize, &BestEvent)> {
        self.events
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.particle == r || e.new_gbest)
    }

    fn is_current(&self, idx: usize, r: usize) -> bool {
        idx == self.current_gbest || idx == self.current_pbest[r]
    }
}

/// Best-vector update with temporal discounting: only positions that were
/// new personal or global bests contribute; superseded ones have their
/// width discounted to `beta * tau^age`, which plays the role of the speed
/// momentum of the velocity-based rule, while the current bests keep the
/// undiscounted `beta`.
pub fn step_bayes_standard(
    state: &mut SwarmState,
    events: &mut BestEventLog,
    objective: &Objective,
    weights: &FitnessWeightSpec,
    params: &GaussianParams,
    rng: &mut RngStream,
) -> Result<()> {
    params.validate()?;
    let now = state.iteration;
    let updated: Vec<Vec<f64>> = (0..state.len())
        .map(|r| {
            let x = &state.particles[r].position;
            let mut grad = vec![0.0; x.len()];
            add_prior_grad(params.prior, x, &mut grad);

            // gather (effective beta, weight, position) grouped by iteration
            let mut terms: Vec<(u64, f64, f64, &[f64])> = Vec::new();
            for (idx, e) in events.relevant(r) {
                let beta_eff = if events.is_current(idx, r) {
                    params.beta
                } else {
                    let age = (now - e.iteration).min(i32::MAX as u64) as i32;
                    params.beta * params.tau.powi(age)
                };
                terms.push((e.iteration, beta_eff, e.weight, e.position.as_slice()));
            }
            let mut start = 0;
            while start < terms.len() {
                let iter_j = terms[start].0;
                let mut end = start;
                while end < terms.len() && terms[end].0 == iter_j {
                    end += 1;
                }
                let group = &terms[start..end];
                match params.assumption {
                    Assumption::Dependence => {
                        let logs: Vec<f64> = group
                            .iter()
                            .map(|(_, b, w, c)| w.ln() + component_log_density(*b, x, c))
                            .collect();
                        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let denom: f64 = logs.iter().map(|l| (l - m).exp()).sum();
                        for (l, (_, b, _, c)) in logs.iter().zip(group) {
                            let s = (l - m).exp() / denom;
                            for (g, (ci, xi)) in grad.iter_mut().zip(c.iter().zip(x)) {
                                *g += b * s * (ci - xi);
                            }
                        }
                    }
                    Assumption::Independence => {
                        let wsum: f64 = group.iter().map(|(_, _, w, _)| w).sum();
                        for (_, b, w, c) in group {
                            let s = w / wsum;
                            for (g, (ci, xi)) in grad.iter_mut().zip(c.iter().zip(x)) {
                                *g += b * s * (ci - xi);
                            }
                        }
                    }
                }
                start = end;
            }
            let mut out = x.clone();
            for (o, g) in out.iter_mut().zip(&grad) {
                *o += params.gamma * g;
            }
            objective.bounds.clamp_in_place(&mut out);
            out
        })
        .collect();
    for (p, x) in state.particles.iter_mut().zip(updated) {
        p.position = x;
    }
    state.iteration += 1;
    let (_, update) = evaluate_and_update(state, objective, rng)?;
    events.record_iteration(state, &update, weights)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ObjectiveId;
    use crate::swarm::init_swarm;

    fn one_group_history(positions: Vec<Vec<f64>>, weights: Vec<f64>) -> PosteriorHistory {
        let mut h = PosteriorHistory::new(100);
        h.push_iteration(0, positions, weights).unwrap();
        h
    }

    fn uniform_indep() -> GaussianParams {
        GaussianParams {
            prior: Prior::Uniform,
            ..GaussianParams::independence()
        }
    }

    fn uniform_dep() -> GaussianParams {
        GaussianParams {
            prior: Prior::Uniform,
            ..GaussianParams::dependence()
        }
    }

    #[test]
    fn single_record_peaks_at_the_record() {
        let h = one_group_history(vec![vec![1.5, -0.5]], vec![3.0]);
        for params in [uniform_dep(), uniform_indep()] {
            let at_center = log_posterior(&[1.5, -0.5], &h, &params).unwrap();
            let away = log_posterior(&[2.5, 0.5], &h, &params).unwrap();
            assert!(at_center > away);
            let grad = log_posterior_grad(&[1.5, -0.5], &h, &params).unwrap();
            assert!(grad.iter().all(|g| g.abs() < 1e-14));
        }
    }

    #[test]
    fn independence_peaks_at_weighted_mean() {
        let h = one_group_history(vec![vec![0.0], vec![2.0]], vec![1.0, 1.0]);
        let params = uniform_indep();
        let g = log_posterior_grad(&[1.0], &h, &params).unwrap();
        assert!(g[0].abs() < 1e-14, "gradient at the mean should vanish");
        let left = log_posterior(&[0.9], &h, &params).unwrap();
        let peak = log_posterior(&[1.0], &h, &params).unwrap();
        let right = log_posterior(&[1.1], &h, &params).unwrap();
        assert!(peak > left && peak > right);
    }

    #[test]
    fn dependence_matches_naive_mixture_on_a_grid() {
        let h = one_group_history(vec![vec![0.0], vec![2.0]], vec![1.0, 1.0]);
        let params = GaussianParams {
            beta: 0.4,
            ..uniform_dep()
        };
        for i in 0..=100 {
            let x = -2.0 + 6.0 * i as f64 / 100.0;
            let naive = ((1.0 * (-0.2 * x * x).exp() + 1.0 * (-0.2 * (x - 2.0) * (x - 2.0)).exp())
                / 2.0)
                .ln();
            let ours = log_posterior(&[x], &h, &params).unwrap();
            assert!((ours - naive).abs() < 1e-12, "x={x}: {ours} vs {naive}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RngStream::new(99);
        for params in [uniform_dep(), uniform_indep()] {
            for trial in 0..20 {
                let dim = 3;
                let mut h = PosteriorHistory::new(100);
                for j in 0..3 {
                    let positions: Vec<Vec<f64>> = (0..4)
                        .map(|_| (0..dim).map(|_| rng.uniform_in(-3.0, 3.0)).collect())
                        .collect();
                    let weights: Vec<f64> = (0..4).map(|_| rng.uniform_in(0.1, 5.0)).collect();
                    h.push_iteration(j, positions, weights).unwrap();
                }
                let x: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
                let grad = log_posterior_grad(&x, &h, &params).unwrap();
                for k in 0..dim {
                    let mut hi = x.clone();
                    let mut lo = x.clone();
                    hi[k] += 1e-6;
                    lo[k] -= 1e-6;
                    let fd = (log_posterior(&hi, &h, &params).unwrap()
                        - log_posterior(&lo, &h, &params).unwrap())
                        / 2e-6;
                    let scale = grad[k].abs().max(fd.abs()).max(1e-8);
                    assert!(
                        (grad[k] - fd).abs() / scale < 1e-5,
                        "trial {trial} dim {k}: analytic {} vs fd {fd}",
                        grad[k]
                    );
                }
            }
        }
    }

    #[test]
    fn weight_scale_invariance_of_gradient() {
        let mut rng = RngStream::new(7);
        let positions: Vec<Vec<f64>> = (0..5).map(|_| vec![rng.uniform_in(-2.0, 2.0)]).collect();
        let weights: Vec<f64> = (0..5).map(|_| rng.uniform_in(0.5, 2.0)).collect();
        let scaled: Vec<f64> = weights.iter().map(|w| w * 137.5).collect();
        let h1 = one_group_history(positions.clone(), weights);
        let h2 = one_group_history(positions, scaled);
        for params in [uniform_dep(), uniform_indep()] {
            let x = vec![0.3];
            let g1 = log_posterior_grad(&x, &h1, &params).unwrap();
            let g2 = log_posterior_grad(&x, &h2, &params).unwrap();
            assert!((g1[0] - g2[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_history_is_an_error() {
        let h = PosteriorHistory::new(10);
        assert!(matches!(
            log_posterior(&[0.0], &h, &uniform_dep()),
            Err(Error::EmptyHistory)
        ));
    }

    #[test]
    fn step_leaves_stationary_swarm_alone() {
        // single record at the particle's own position, uniform prior
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(3);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        let x = state.particles[0].position.clone();
        let weights = FitnessWeightSpec::default();
        let mut history = history_from_init(&state, &weights, 100).unwrap();
        step_gaussian(&mut state, &mut history, &obj, &weights, &uniform_indep(), &mut rng).unwrap();
        assert_eq!(state.particles[0].position, x);
        assert_eq!(history.len(), 2);
    }

    #[test]
    fn step_matches_hand_computed_update() {
        // 1-D, independence, uniform prior, records at 0 and 2 with equal
        // weights, particle at 0, gamma 0.8, beta 0.1 -> x' = 0.08
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(3);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![0.0];
        let mut history = one_group_history(vec![vec![0.0], vec![2.0]], vec![1.0, 1.0]);
        let params = GaussianParams {
            gamma: 0.8,
            beta: 0.1,
            ..uniform_indep()
        };
        let weights = FitnessWeightSpec::default();
        step_gaussian(&mut state, &mut history, &obj, &weights, &params, &mut rng).unwrap();
        assert!((state.particles[0].position[0] - 0.08).abs() < 1e-15);
    }

    #[test]
    fn gaussian_unit_prior_contracts_toward_origin() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(3);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![4.0];
        let mut history = one_group_history(vec![vec![4.0]], vec![1.0]);
        let params = GaussianParams {
            prior: Prior::GaussianUnit,
            gamma: 0.8,
            ..GaussianParams::independence()
        };
        let weights = FitnessWeightSpec::default();
        step_gaussian(&mut state, &mut history, &obj, &weights, &params, &mut rng).unwrap();
        // attraction term vanishes, so x' = (1 - gamma) x
        assert!((state.particles[0].position[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn window_discipline_under_stepping() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(12);
        let mut state = init_swarm(3, &obj, &mut rng).unwrap();
        let weights = FitnessWeightSpec::default();
        let params = GaussianParams {
            window: 5,
            ..uniform_indep()
        };
        let mut history = history_from_init(&state, &weights, params.window).unwrap();
        for _ in 0..20 {
            step_gaussian(&mut state, &mut history, &obj, &weights, &params, &mut rng).unwrap();
        }
        assert_eq!(history.len(), 5);
    }

    #[test]
    fn current_only_fixed_point_when_collapsed() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(3, &obj, &mut rng).unwrap();
        let x = vec![1.0, -1.0];
        for p in &mut state.particles {
            p.position = x.clone();
        }
        let raws = vec![obj.eval(&x).unwrap(); 3];
        let weights = FitnessWeightSpec::default();
        step_current_only(&mut state, &raws, &obj, &weights, &uniform_indep(), &mut rng).unwrap();
        for p in &state.particles {
            assert_eq!(p.position, x);
        }
    }

    #[test]
    fn current_only_moves_to_the_swarm_mean() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(3, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![0.0];
        state.particles[1].position = vec![1.0];
        state.particles[2].position = vec![2.0];
        let raws = vec![5.0; 3]; // equal weights
        let params = GaussianParams {
            gamma: 1.0,
            beta: 1.0,
            ..uniform_indep()
        };
        let weights = FitnessWeightSpec::default();
        step_current_only(&mut state, &raws, &obj, &weights, &params, &mut rng).unwrap();
        for p in &state.particles {
            assert!((p.position[0] - 1.0).abs() < 1e-15, "got {}", p.position[0]);
        }
    }

    #[test]
    fn current_only_is_weight_scale_invariant() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let raws_a = vec![1.0, 2.0, 4.0];
        // same weight RATIOS after the reciprocal map: scale raws by 1/c
        let c = 3.75;
        let raws_b: Vec<f64> = raws_a.iter().map(|r| r / c).collect();
        let weights = FitnessWeightSpec::default();
        let params = uniform_dep();
        let mut out = Vec::new();
        for raws in [raws_a, raws_b] {
            let mut rng = RngStream::new(4);
            let mut state = init_swarm(3, &obj, &mut rng).unwrap();
            state.particles[0].position = vec![-1.0];
            state.particles[1].position = vec![0.5];
            state.particles[2].position = vec![2.0];
            step_current_only(&mut state, &raws, &obj, &weights, &params, &mut rng).unwrap();
            out.push(state.particles.iter().map(|p| p.position[0]).collect::<Vec<_>>());
        }
        for (a, b) in out[0].iter().zip(&out[1]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn discounted_gbest_geometric_sum() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![0.0];
        let g = vec![3.0];
        let trace: Vec<Vec<f64>> = (0..200).map(|_| g.clone()).collect();
        let params = GaussianParams {
            gamma: 1.0,
            beta: 0.1,
            tau: 0.5,
            ..uniform_indep()
        };
        step_discounted_gbest(&mut state, &trace, &obj, &params, &mut rng).unwrap();
        // sum of tau^age converges to 2: x' = 0 + 1 * 0.1 * 2 * (3 - 0)
        assert!((state.particles[0].position[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn discounted_gbest_single_entry() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        state.particles[0].position = vec![1.0];
        let params = GaussianParams {
            gamma: 0.8,
            beta: 0.1,
            tau: 0.5,
            ..uniform_indep()
        };
        step_discounted_gbest(&mut state, &[vec![5.0]], &obj, &params, &mut rng).unwrap();
        // single pull with coefficient gamma * beta
        let expected = 1.0 + 0.8 * 0.1 * (5.0 - 1.0);
        assert!((state.particles[0].position[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn discounted_gbest_zero_displacement() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        let g = vec![0.5, -0.5];
        state.particles[0].position = g.clone();
        let trace = vec![g.clone(), g.clone(), g.clone()];
        let params = uniform_indep();
        step_discounted_gbest(&mut state, &trace, &obj, &params, &mut rng).unwrap();
        assert_eq!(state.particles[0].position, g);
    }

    #[test]
    fn posterior_mass_is_concentrated() {
        // trapezoid-integrate the exponentiated posterior over an interval
        // covering all modes; doubling the interval must not change the
        // mass beyond 1e-3, i.e. the mixture is a proper density
        let h = one_group_history(vec![vec![-1.0], vec![0.5], vec![2.0]], vec![1.0, 3.0, 0.5]);
        for params in [uniform_dep(), uniform_indep()] {
            let sigma = (1.0 / params.beta).sqrt();
            let integrate = |lo: f64, hi: f64| {
                let n = 20_000;
                let dx = (hi - lo) / n as f64;
                let mut acc = 0.0;
                for i in 0..=n {
                    let x = lo + i as f64 * dx;
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    acc += w * log_posterior(&[x], &h, &params).unwrap().exp();
                }
                acc * dx
            };
            let base = integrate(-1.0 - 8.0 * sigma, 2.0 + 8.0 * sigma);
            let wide = integrate(-1.0 - 16.0 * sigma, 2.0 + 16.0 * sigma);
            assert!(
                (wide / base - 1.0).abs() < 1e-3,
                "mass not concentrated: base {base}, wide {wide}"
            );
        }
    }

    #[test]
    fn bayes_standard_fixed_point() {
        let obj = Objective::with_dim(ObjectiveId::Sphere, 2);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(1, &obj, &mut rng).unwrap();
        let x = state.particles[0].position.clone();
        let weights = FitnessWeightSpec::default();
        let mut events = BestEventLog::from_init(&state, &weights).unwrap();
        let params = uniform_indep();
        step_bayes_standard(&mut state, &mut events, &obj, &weights, &params, &mut rng).unwrap();
        assert_eq!(state.particles[0].position, x);
    }

    #[test]
    fn bayes_standard_matches_term_accumulation_oracle() {
        // 1-D, two particles, hand-built event log with one gbest change
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(2, &obj, &mut rng).unwrap();
        let weights = FitnessWeightSpec::default();

        // initial bests: particle 0 at 4 (raw 16), particle 1 at 2 (raw 4, gbest)
        state.particles[0].position = vec![4.0];
        state.particles[0].best_position = vec![4.0];
        state.particles[0].best_raw = 16.0;
        state.particles[1].position = vec![2.0];
        state.particles[1].best_position = vec![2.0];
        state.particles[1].best_raw = 4.0;
        state.global_best_position = vec![2.0];
        state.global_best_raw = 4.0;
        let mut events = BestEventLog::from_init(&state, &weights).unwrap();

        // iteration 1: particle 1 improves to 1 (raw 1) and takes the gbest
        state.iteration = 1;
        state.particles[1].position = vec![1.0];
        let update = crate::swarm::update_bests(&mut state, &[(0, 17.0), (1, 1.0)]).unwrap();
        assert!(update.gbest_changed);
        events.record_iteration(&state, &update, &weights).unwrap();

        let params = GaussianParams {
            gamma: 0.8,
            beta: 0.1,
            tau: 0.5,
            ..uniform_indep()
        };
        let x0 = state.particles[0].position[0];
        let x1 = state.particles[1].position[0];
        step_bayes_standard(&mut state, &mut events, &obj, &weights, &params, &mut rng).unwrap();

        // oracle: accumulate the terms of the common update form directly.
        // particle 0 sees: own current pbest (iter 0, undiscounted),
        // superseded gbest event at 2 (iter 0, discounted once), current
        // gbest event at 1 (iter 1, undiscounted).
        let w_pb0 = 1.0 / 16.0;
        let w_g_old = 1.0 / 4.0;
        // iteration-0 group for particle 0: records at 4 (pbest, beta) and 2
        // (old gbest, beta * tau)
        let wsum0 = w_pb0 + w_g_old;
        let g0_term_iter0 = (w_pb0 / wsum0) * 0.1 * (4.0 - x0)
            + (w_g_old / wsum0) * (0.1 * 0.5) * (2.0 - x0);
        // iteration-1 group: the new gbest at 1, undiscounted
        let g0_term_iter1 = 1.0 * 0.1 * (1.0 - x0);
        let expect0 = x0 + 0.8 * (g0_term_iter0 + g0_term_iter1);

        // particle 1 sees: own superseded pbest at 2 shares the iteration-0
        // group with nothing else relevant beyond itself (it was also the
        // old gbest), then its current pbest/gbest at 1.
        let g1_term_iter0 = 1.0 * (0.1 * 0.5) * (2.0 - x1);
        let g1_term_iter1 = 1.0 * 0.1 * (1.0 - x1);
        let expect1 = x1 + 0.8 * (g1_term_iter0 + g1_term_iter1);

        assert!(
            (state.particles[0].position[0] - expect0).abs() < 1e-12,
            "particle 0: {} vs {}",
            state.particles[0].position[0],
            expect0
        );
        assert!(
            (state.particles[1].position[0] - expect1).abs() < 1e-12,
            "particle 1: {} vs {}",
            state.particles[1].position[0],
            expect1
        );
    }

    #[test]
    fn bayes_standard_tau_to_zero_keeps_only_current_bests() {
        // with tau tiny, superseded events contribute ~nothing: the update
        // reduces to pulls toward the current pbest and gbest
        let obj = Objective::with_dim(ObjectiveId::Sphere, 1);
        let mut rng = RngStream::new(4);
        let mut state = init_swarm(2, &obj, &mut rng).unwrap();
        let weights = FitnessWeightSpec::default();
        state.particles[0].position = vec![4.0];
        state.particles[0].best_position = vec![4.0];
        state.particles[0].best_raw = 16.0;
        state.particles[1].position = vec![2.0];
        state.particles[1].best_position = vec![2.0];
        state.particles[1].best_raw = 4.0;
        state.global_best_position = vec![2.0];
        state.global_best_raw = 4.0;
        let mut events = BestEventLog::from_init(&state, &weights).unwrap();
        state.iteration = 1;
        state.particles[1].position = vec![1.0];
        let update = crate::swarm::update_bests(&mut state, &[(0, 17.0), (1, 1.0)]).unwrap();
        events.record_iteration(&state, &update, &weights).unwrap();

        let params = GaussianParams {
            gamma: 0.8,
            beta: 0.1,
            tau: 1e-12,
            ..uniform_indep()
        };
        let x0 = state.particles[0].position[0];
        step_bayes_standard(&mut state, &mut events, &obj, &weights, &params, &mut rng).unwrap();
        // surviving pulls for particle 0: its pbest at 4 (normalized within
        // its group against the dead event's weight) and the gbest at 1
        let w_pb0 = 1.0 / 16.0;
        let w_g_old = 1.0 / 4.0;
        let wsum0 = w_pb0 + w_g_old;
        let expect0 = x0 + 0.8 * ((w_pb0 / wsum0) * 0.1 * (4.0 - x0) + 0.1 * (1.0 - x0));
        assert!((state.particles[0].position[0] - expect0).abs() < 1e-9);
    }
}
