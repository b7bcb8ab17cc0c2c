//! Algorithm registry and the per-run dispatcher that owns each update
//! rule's auxiliary state (posterior history, best-event log, gbest trace,
//! per-particle filter states).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::barebones::{step_barebones, BareBonesParams, CovMode};
use crate::classic::{step_constricted, step_standard, ClassicParams};
use crate::error::{Error, Result};
use crate::fitness::{FitnessWeightSpec, MonotoneTransform};
use crate::gaussian::{
    history_from_init, step_bayes_standard, step_current_only, step_discounted_gbest,
    step_gaussian, Assumption, BestEventLog, GaussianParams, Prior,
};
use crate::history::PosteriorHistory;
use crate::kalman::{kalman_step, KalmanParams, KalmanParticleState};
use crate::kernel::{step_kernel, step_kernel_standard, Kernel, KernelParams, KernelStandardParams};
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{evaluate_and_update, SwarmState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Standard,
    Constricted,
    BareBones,
    BareBonesScalar,
    GaussianDep,
    GaussianIndep,
    GaussianCurrentDep,
    GaussianCurrentIndep,
    GaussianGbestTrace,
    BayesStandard,
    Kalman,
    KernelStandard,
    KernelDep,
    KernelIndep,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 14] = [
        AlgorithmKind::Standard,
        AlgorithmKind::Constricted,
        AlgorithmKind::BareBones,
        AlgorithmKind::BareBonesScalar,
        AlgorithmKind::GaussianDep,
        AlgorithmKind::GaussianIndep,
        AlgorithmKind::GaussianCurrentDep,
        AlgorithmKind::GaussianCurrentIndep,
        AlgorithmKind::GaussianGbestTrace,
        AlgorithmKind::BayesStandard,
        AlgorithmKind::Kalman,
        AlgorithmKind::KernelStandard,
        AlgorithmKind::KernelDep,
        AlgorithmKind::KernelIndep,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::Standard => "standard",
            AlgorithmKind::Constricted => "constricted",
            AlgorithmKind::BareBones => "barebones",
            AlgorithmKind::BareBonesScalar => "barebones-scalar",
            AlgorithmKind::GaussianDep => "gaussian-dep",
            AlgorithmKind::GaussianIndep => "gaussian-indep",
            AlgorithmKind::GaussianCurrentDep => "gaussian-current-dep",
            AlgorithmKind::GaussianCurrentIndep => "gaussian-current-indep",
            AlgorithmKind::GaussianGbestTrace => "gaussian-gbest-trace",
            AlgorithmKind::BayesStandard => "bayes-standard",
            AlgorithmKind::Kalman => "kalman",
            AlgorithmKind::KernelStandard => "kernel-standard",
            AlgorithmKind::KernelDep => "kernel-dep",
            AlgorithmKind::KernelIndep => "kernel-indep",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_owned()))
    }
}

/// Optional parameter overrides layered over each algorithm's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub prior: Option<Prior>,
    pub window: Option<usize>,
    pub cov_mode: Option<CovMode>,
    pub bb_scale: Option<f64>,
    pub kernel: Option<String>,
    pub kernel_mu: Option<f64>,
    pub w: Option<f64>,
    pub phi: Option<f64>,
    pub eta: Option<f64>,
    pub chi_as_inertia: Option<bool>,
    pub beta_g: Option<f64>,
    pub beta_b: Option<f64>,
    pub epsilon: Option<f64>,
    pub transform: Option<MonotoneTransform>,
}

/// Fully resolved parameters for one run of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    pub classic: ClassicParams,
    pub barebones: BareBonesParams,
    pub gaussian: GaussianParams,
    pub kernel: KernelParams,
    pub kernel_standard: KernelStandardParams,
    pub weight_spec: FitnessWeightSpec,
}

impl AlgorithmConfig {
    /// Benchmark-protocol defaults for `kind`, with `overrides` applied on
    /// top. The bare bones scale defaults to the narrowed 1/5 covariance
    /// used by the benchmark runs.
    pub fn resolve(kind: AlgorithmKind, overrides: &Overrides) -> Result<Self> {
        let mut classic = match kind {
            AlgorithmKind::Constricted => ClassicParams::constricted(),
            _ => ClassicParams::standard(),
        };
        if let Some(w) = overrides.w {
            classic.w = w;
        }
        if let Some(phi) = overrides.phi {
            classic.phi = phi;
        }
        if let Some(eta) = overrides.eta {
            classic.eta = eta;
        }
        if let Some(flag) = overrides.chi_as_inertia {
            classic.chi_as_inertia = flag;
        }

        let mut barebones = BareBonesParams {
            cov_mode: match kind {
                AlgorithmKind::BareBonesScalar => CovMode::Scalar,
                _ => CovMode::PerDimension,
            },
            scale: 0.2,
        };
        if let Some(mode) = overrides.cov_mode {
            barebones.cov_mode = mode;
        }
        if let Some(scale) = overrides.bb_scale {
            if scale <= 0.0 {
                return Err(Error::InvalidParameter("bb-scale must be positive".into()));
            }
            barebones.scale = scale;
        }

        let assumption = match kind {
            AlgorithmKind::GaussianDep
            | AlgorithmKind::GaussianCurrentDep
            | AlgorithmKind::KernelDep => Assumption::Dependence,
            _ => Assumption::Independence,
        };
        let mut gaussian = match assumption {
            Assumption::Dependence => GaussianParams::dependence(),
            Assumption::Independence => GaussianParams::independence(),
        };
        if let Some(gamma) = overrides.gamma {
            gaussian.gamma = gamma;
        }
        if let Some(beta) = overrides.beta {
            gaussian.beta = beta;
        }
        if let Some(tau) = overrides.tau {
            gaussian.tau = tau;
        }
        if let Some(prior) = overrides.prior {
            gaussian.prior = prior;
        }
        if let Some(window) = overrides.window {
            gaussian.window = window;
        }
        gaussian.validate()?;

        let kernel = match overrides.kernel.as_deref() {
            Some(id) => Kernel::from_id(id, overrides.kernel_mu.unwrap_or(1.0))?,
            None => Kernel::Sinc {
                mu: overrides.kernel_mu.unwrap_or(1.0),
            },
        };
        let kernel = KernelParams {
            kernel,
            gamma: gaussian.gamma,
            beta: gaussian.beta,
            tau: gaussian.tau,
            assumption,
            prior: gaussian.prior,
        };

        let kernel_standard = KernelStandardParams {
            beta_g: overrides.beta_g.unwrap_or(2.0),
            beta_b: overrides.beta_b.unwrap_or(2.0),
        };

        let mut weight_spec = FitnessWeightSpec::default();
        if let Some(eps) = overrides.epsilon {
            if eps <= 0.0 {
                return Err(Error::InvalidParameter("epsilon must be positive".into()));
            }
            weight_spec.epsilon = eps;
        }
        weight_spec.transform = overrides.transform;

        Ok(Self {
            kind,
            classic,
            barebones,
            gaussian,
            kernel,
            kernel_standard,
            weight_spec,
        })
    }
}

enum Aux {
    None,
    History(PosteriorHistory),
    CurrentRaws(Vec<f64>),
    GbestTrace(Vec<Vec<f64>>),
    Events(BestEventLog),
    Kalman {
        params: KalmanParams,
        states: Vec<KalmanParticleState>,
    },
}

/// One algorithm bound to one run: resolved parameters plus whatever
/// auxiliary state the update rule carries between steps.
pub struct AlgorithmRun {
    config: AlgorithmConfig,
    aux: Aux,
}

impl AlgorithmRun {
    /// Build the dispatcher for a freshly initialized swarm.
    pub fn new(kind: AlgorithmKind, overrides: &Overrides, state: &SwarmState) -> Result<Self> {
        let config = AlgorithmConfig::resolve(kind, overrides)?;
        let aux = match kind {
            AlgorithmKind::Standard
            | AlgorithmKind::Constricted
            | AlgorithmKind::BareBones
            | AlgorithmKind::BareBonesScalar
            | AlgorithmKind::KernelStandard => Aux::None,
            AlgorithmKind::GaussianDep | AlgorithmKind::GaussianIndep => Aux::History(
                history_from_init(state, &config.weight_spec, config.gaussian.window)?,
            ),
            AlgorithmKind::KernelDep | AlgorithmKind::KernelIndep => Aux::History(
                history_from_init(state, &config.weight_spec, config.gaussian.window)?,
            ),
            AlgorithmKind::GaussianCurrentDep | AlgorithmKind::GaussianCurrentIndep => {
                Aux::CurrentRaws(state.best_raws())
            }
            AlgorithmKind::GaussianGbestTrace => {
                Aux::GbestTrace(vec![state.global_best_position.clone()])
            }
            AlgorithmKind::BayesStandard => {
                Aux::Events(BestEventLog::from_init(state, &config.weight_spec)?)
            }
            AlgorithmKind::Kalman => Aux::Kalman {
                params: KalmanParams::for_dim(state.dim()),
                states: state
                    .particles
                    .iter()
                    .map(|p| KalmanParticleState::new(&p.position))
                    .collect(),
            },
        };
        Ok(Self { config, aux })
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    /// Advance the swarm by one iteration.
    pub fn step(
        &mut self,
        state: &mut SwarmState,
        objective: &Objective,
        rng: &mut RngStream,
    ) -> Result<()> {
        let config = &self.config;
        match (&mut self.aux, config.kind) {
            (Aux::None, AlgorithmKind::Standard) => {
                step_standard(state, objective, &config.classic, rng)
            }
            (Aux::None, AlgorithmKind::Constricted) => {
                step_constricted(state, objective, &config.classic, rng)
            }
            (Aux::None, AlgorithmKind::BareBones | AlgorithmKind::BareBonesScalar) => {
                step_barebones(state, objective, &config.barebones, rng)
            }
            (Aux::None, AlgorithmKind::KernelStandard) => {
                step_kernel_standard(state, objective, &config.kernel_standard, rng)
            }
            (Aux::History(history), AlgorithmKind::GaussianDep | AlgorithmKind::GaussianIndep) => {
                step_gaussian(
                    state,
                    history,
                    objective,
                    &config.weight_spec,
                    &config.gaussian,
                    rng,
                )
            }
            (Aux::History(history), AlgorithmKind::KernelDep | AlgorithmKind::KernelIndep) => {
                step_kernel(
                    state,
                    history,
                    objective,
                    &config.weight_spec,
                    &config.kernel,
                    rng,
                )
            }
            (Aux::CurrentRaws(raws), _) => {
                *raws = step_current_only(
                    state,
                    raws,
                    objective,
                    &config.weight_spec,
                    &config.gaussian,
                    rng,
                )?;
                Ok(())
            }
            (Aux::GbestTrace(trace), _) => {
                step_discounted_gbest(state, trace, objective, &config.gaussian, rng)?;
                trace.push(state.global_best_position.clone());
                Ok(())
            }
            (Aux::Events(events), _) => step_bayes_standard(
                state,
                events,
                objective,
                &config.weight_spec,
                &config.gaussian,
                rng,
            ),
            (Aux::Kalman { params, states }, _) => {
                let gbest = state.global_best_position.clone();
                for (p, kstate) in state.particles.iter_mut().zip(states.iter_mut()) {
                    let (next, position) =
                        kalman_step(kstate, &gbest, &p.best_position, params, rng)?;
                    *kstate = next;
                    p.position = position;
                    objective.bounds.clamp_in_place(&mut p.position);
                }
                state.iteration += 1;
                evaluate_and_update(state, objective, rng)?;
                Ok(())
            }
            _ => Err(Error::InvalidConfig(format!(
                "auxiliary state does not match algorithm {}",
                config.kind
            ))),
        }
    }
}
