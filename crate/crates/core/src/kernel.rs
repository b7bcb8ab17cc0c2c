//! Kernel extension: the component densities and gradient-ascent updates
//! rewritten through a Mercer kernel, plus the trigonometric
//! kernel-standard update.
//!
//! The squared distance in the transformed space is
//! `K(x,x) + K(y,y) - 2 K(x,y)`; with the linear kernel this collapses to
//! the plain squared distance, which makes every operation here reproduce
//! its Gaussian counterpart and serves as the bridge the tests lean on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{fitness_weight, FitnessWeightSpec};
use crate::gaussian::{Assumption, Prior};
use crate::history::PosteriorHistory;
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{evaluate_and_update, SwarmState};
use crate::vecmath::{dist_sq, dot};

/// Built-in kernels. The trigonometric one exists only through the
/// kernel-standard update; it has no pointwise `K(x, y)` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// `sqrt(||x - y||^2 + mu)`, a multiquadric.
    SqrtShift { mu: f64 },
    /// `(mu / r) sin(r / mu)` with `r = ||x - y||`; 1 at coincident points.
    Sinc { mu: f64 },
    /// `(1 - cos(r) / 2) / (5/4 - cos(r))` with `r = ||x - y||`.
    Poisson,
    /// Placeholder for the trigonometric kernel of the kernel-standard
    /// update; not pointwise evaluable.
    Trig,
    /// `<x, y>`; the bridge back to the Gaussian operations.
    Linear,
}

impl Kernel {
    pub const IDS: [&'static str; 5] = ["sqrt_shift", "sinc", "poisson", "trig", "linear"];

    pub fn from_id(id: &str, mu: f64) -> Result<Self> {
        match id {
            "sqrt_shift" => {
                if mu <= 0.0 {
                    return Err(Error::InvalidParameter("kernel mu must be positive".into()));
                }
                Ok(Kernel::SqrtShift { mu })
            }
            "sinc" => {
                if mu <= 0.0 {
                    return Err(Error::InvalidParameter("kernel mu must be positive".into()));
                }
                Ok(Kernel::Sinc { mu })
            }
            "poisson" => Ok(Kernel::Poisson),
            "trig" => Ok(Kernel::Trig),
            "linear" => Ok(Kernel::Linear),
            other => Err(Error::UnknownKernel(other.to_owned())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Kernel::SqrtShift { .. } => "sqrt_shift",
            Kernel::Sinc { .. } => "sinc",
            Kernel::Poisson => "poisson",
            Kernel::Trig => "trig",
            Kernel::Linear => "linear",
        }
    }

    pub fn is_shift_invariant(&self) -> bool {
        !matches!(self, Kernel::Linear | Kernel::Trig)
    }

    /// `K(x, x)` for the shift-invariant kernels.
    pub fn self_value(&self) -> Option<f64> {
        match self {
            Kernel::SqrtShift { mu } => Some(mu.sqrt()),
            Kernel::Sinc { .. } => Some(1.0),
            Kernel::Poisson => Some(2.0),
            Kernel::Linear | Kernel::Trig => None,
        }
    }
}

/// Kernel value `K(x, y)`; the sinc kernel takes its continuity limit 1 at
/// coincident points.
pub fn kernel_eval(kernel: &Kernel, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    match kernel {
        Kernel::SqrtShift { mu } => Ok((dist_sq(x, y) + mu).sqrt()),
        Kernel::Sinc { mu } => {
            let r = dist_sq(x, y).sqrt();
            if r == 0.0 {
                Ok(1.0)
            } else {
                Ok(mu / r * (r / mu).sin())
            }
        }
        Kernel::Poisson => {
            let r = dist_sq(x, y).sqrt();
            Ok((1.0 - 0.5 * r.cos()) / (1.25 - r.cos()))
        }
        Kernel::Linear => Ok(dot(x, y)),
        Kernel::Trig => Err(Error::UnsupportedKernel("trig")),
    }
}

/// `d/dx K(x, y)`. The removable singularities of sinc and poisson at
/// coincident points take their symmetric-limit value, the zero vector.
pub fn kernel_grad(kernel: &Kernel, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    match kernel {
        Kernel::SqrtShift { mu } => {
            let denom = (dist_sq(x, y) + mu).sqrt();
            Ok(diff.iter().map(|d| d / denom).collect())
        }
        Kernel::Sinc { mu } => {
            let r = dist_sq(x, y).sqrt();
            if r == 0.0 {
                return Ok(vec![0.0; x.len()]);
            }
            // dK/dr = cos(r/mu)/r - mu sin(r/mu)/r^2
            let dk_dr = (r / mu).cos() / r - mu * (r / mu).sin() / (r * r);
            Ok(diff.iter().map(|d| dk_dr * d / r).collect())
        }
        Kernel::Poisson => {
            let r = dist_sq(x, y).sqrt();
            if r == 0.0 {
                return Ok(vec![0.0; x.len()]);
            }
            let c = r.cos();
            // dK/dr = -(3/8) sin(r) / (5/4 - cos r)^2
            let dk_dr = -0.375 * r.sin() / ((1.25 - c) * (1.25 - c));
            Ok(diff.iter().map(|d| dk_dr * d / r).collect())
        }
        Kernel::Linear => Ok(y.to_vec()),
        Kernel::Trig => Err(Error::UnsupportedKernel("trig")),
    }
}

/// Total derivative `d/dx K(x, x)`; zero for shift-invariant kernels.
pub fn kernel_self_grad(kernel: &Kernel, x: &[f64]) -> Result<Vec<f64>> {
    match kernel {
        Kernel::Linear => Ok(x.iter().map(|v| 2.0 * v).collect()),
        Kernel::Trig => Err(Error::UnsupportedKernel("trig")),
        _ => Ok(vec![0.0; x.len()]),
    }
}

/// Log of the kernelized component density:
/// `-beta/2 (K(x,x) + K(c,c) - 2 K(x,c))`.
pub fn kernel_component_log_density(
    kernel: &Kernel,
    beta: f64,
    x: &[f64],
    center: &[f64],
) -> Result<f64> {
    let kxx = kernel_eval(kernel, x, x)?;
    let kcc = kernel_eval(kernel, center, center)?;
    let kxc = kernel_eval(kernel, x, center)?;
    Ok(-0.5 * beta * (kxx + kcc - 2.0 * kxc))
}

/// Gradient of the kernelized component log-density with respect to `x`.
fn kernel_component_grad(kernel: &Kernel, x: &[f64], center: &[f64]) -> Result<Vec<f64>> {
    let self_grad = kernel_self_grad(kernel, x)?;
    let cross = kernel_grad(kernel, x, center)?;
    Ok(self_grad
        .iter()
        .zip(&cross)
        .map(|(s, c)| c - 0.5 * s)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub kernel: Kernel,
    pub gamma: f64,
    pub beta: f64,
    pub tau: f64,
    pub assumption: Assumption,
    pub prior: Prior,
}

impl KernelParams {
    pub fn new(kernel: Kernel, assumption: Assumption) -> Self {
        Self {
            kernel,
            gamma: 0.8,
            beta: match assumption {
                Assumption::Dependence => 0.4,
                Assumption::Independence => 0.1,
            },
            tau: 0.5,
            assumption,
            prior: Prior::Uniform,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(
                "kernel step needs gamma in (0, 1] and beta > 0".into(),
            ));
        }
        if matches!(self.kernel, Kernel::Trig) {
            return Err(Error::UnsupportedKernel("trig"));
        }
        Ok(())
    }
}

/// Gradient of the kernelized log posterior at `x`.
pub fn kernel_log_posterior_grad(
    x: &[f64],
    history: &PosteriorHistory,
    params: &KernelParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut grad = vec![0.0; x.len()];
    if params.prior == Prior::GaussianUnit {
        // gradient of -1/2 (K(x,x) + K(0,0) - 2 K(x,0))
        let origin = vec![0.0; x.len()];
        let g = kernel_component_grad(&params.kernel, x, &origin)?;
        for (gi, p) in grad.iter_mut().zip(&g) {
            *gi += p;
        }
    }
    for group in history.groups() {
        match params.assumption {
            Assumption::Dependence => {
                let logs: Vec<f64> = group
                    .positions
                    .iter()
                    .zip(&group.weights)
                    .map(|(c, w)| {
                        Ok(w.ln() + kernel_component_log_density(&params.kernel, params.beta, x, c)?)
                    })
                    .collect::<Result<_>>()?;
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let denom: f64 = logs.iter().map(|l| (l - m).exp()).sum();
                for (l, c) in logs.iter().zip(&group.positions) {
                    let s = (l - m).exp() / denom;
                    let g = kernel_component_grad(&params.kernel, x, c)?;
                    for (gi, p) in grad.iter_mut().zip(&g) {
                        *gi += params.beta * s * p;
                    }
                }
            }
            Assumption::Independence => {
                for (c, w) in group.positions.iter().zip(&group.weights) {
                    let s = w / group.weight_sum;
                    let g = kernel_component_grad(&params.kernel, x, c)?;
                    for (gi, p) in grad.iter_mut().zip(&g) {
                        *gi += params.beta * s * p;
                    }
                }
            }
        }
    }
    Ok(grad)
}

/// Log of the kernelized posterior at `x`, up to an additive constant;
/// used by the gradient checks.
pub fn kernel_log_posterior(
    x: &[f64],
    history: &PosteriorHistory,
    params: &KernelParams,
) -> Result<f64> {
    params.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut total = 0.0;
    if params.prior == Prior::GaussianUnit {
        let origin = vec![0.0; x.len()];
        total += kernel_component_log_density(&params.kernel, 1.0, x, &origin)?;
    }
    for group in history.groups() {
        match params.assumption {
            Assumption::Dependence => {
                let logs: Vec<f64> = group
                    .positions
                    .iter()
                    .zip(&group.weights)
                    .map(|(c, w)| {
                        Ok(w.ln() + kernel_component_log_density(&params.kernel, params.beta, x, c)?)
                    })
                    .collect::<Result<_>>()?;
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = logs.iter().map(|l| (l - m).exp()).sum();
                total += m + sum.ln() - group.weight_sum.ln();
            }
            Assumption::Independence => {
                let mut acc = 0.0;
                for (c, w) in group.positions.iter().zip(&group.weights) {
                    acc += w * kernel_component_log_density(&params.kernel, params.beta, x, c)?;
                }
                total += acc / group.weight_sum;
            }
        }
    }
    Ok(total)
}

/// Gradient-ascent step on the kernelized posterior; mirrors the Gaussian
/// step with kernel component densities and gradients.
pub fn step_kernel(
    state: &mut SwarmState,
    history: &mut PosteriorHistory,
    objective: &Objective,
    weights: &FitnessWeightSpec,
    params: &KernelParams,
    rng: &mut RngStream,
) -> Result<()> {
    params.validate()?;
    let updated: Vec<Vec<f64>> = state
        .particles
        .iter()
        .map(|p| {
            let grad = kernel_log_posterior_grad(&p.position, history, params)?;
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
    let positions: Vec<Vec<f64>> = state.particles.iter().map(|p| p.position.clone()).collect();
    let mut ws = Vec::with_capacity(raws.len());
    for r in &raws {
        ws.push(fitness_weight(*r, weights)?);
    }
    history.push_iteration(state.iteration, positions, ws)?;
    Ok(())
}

/// Attraction coefficients of the kernel-standard update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelStandardParams {
    pub beta_g: f64,
    pub beta_b: f64,
}

impl Default for KernelStandardParams {
    fn default() -> Self {
        Self {
            beta_g: 2.0,
            beta_b: 2.0,
        }
    }
}

/// The trigonometric pull factor `sin(d2 + sin(d2)) * exp(cos(d2))`
/// evaluated at a squared displacement `d2`.
pub fn trig_pull_factor(d2: f64) -> f64 {
    (d2 + d2.sin()).sin() * d2.cos().exp()
}

/// One particle's kernel-standard update with an explicit uniform draw
/// `r`; exposed so tests can force the draw.
pub fn kernel_standard_update(
    position: &[f64],
    gbest: &[f64],
    pbest: &[f64],
    params: &KernelStandardParams,
    r: f64,
) -> Vec<f64> {
    let d2_g = dist_sq(position, gbest);
    let d2_b = dist_sq(position, pbest);
    let f_g = trig_pull_factor(d2_g);
    let f_b = trig_pull_factor(d2_b);
    position
        .iter()
        .zip(gbest.iter().zip(pbest))
        .map(|(x, (g, b))| {
            x + r * params.beta_g * f_g * (x - g) + r * params.beta_b * f_b * (x - b)
        })
        .collect()
}

/// Kernel-standard step: trigonometric factors of the displacement
/// magnitudes replace the per-dimension random multipliers; one fresh
/// uniform draw per particle scales both pulls. The momentum term is
/// dropped (the discount is zero in this variant).
pub fn step_kernel_standard(
    state: &mut SwarmState,
    objective: &Objective,
    params: &KernelStandardParams,
    rng: &mut RngStream,
) -> Result<()> {
    let gbest = state.global_best_position.clone();
    for p in &mut state.particles {
        let r = rng.next_uniform();
        p.position = kernel_standard_update(&p.position, &gbest, &p.best_position, params, r);
        objective.bounds.clamp_in_place(&mut p.position);
    }
    state.iteration += 1;
    evaluate_and_update(state, objective, rng)?;
    Ok(())
}
