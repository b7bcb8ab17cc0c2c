//! Kalman-filter particle updates and the product-of-Gaussians form they
//! reduce to.
//!
//! Each particle tracks a stacked position/velocity estimate with a
//! `2m x 2m` covariance. The filter uses the structured transition
//! `F = [[I, I], [0, I]]` and observation `H = (I 0)`; the observation fed
//! to the filter blends the personal and global bests through the balance
//! matrix. The reduced position-only update and the product-of-Gaussians
//! update are two routes to the same posterior and are kept as separately
//! testable operations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Per-particle filter state: stacked `(position, velocity)` estimate and
/// its covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanParticleState {
    pub estimate: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl KalmanParticleState {
    /// Fresh state: estimate `(position, 0)`, identity covariance.
    pub fn new(position: &[f64]) -> Self {
        let m = position.len();
        let mut estimate = DVector::zeros(2 * m);
        for (k, x) in position.iter().enumerate() {
            estimate[k] = *x;
        }
        Self {
            estimate,
            covariance: DMatrix::identity(2 * m, 2 * m),
        }
    }

    pub fn dim(&self) -> usize {
        self.estimate.len() / 2
    }

    /// Symmetry defect and smallest eigenvalue of the covariance; used to
    /// check the positive-semi-definiteness invariant.
    pub fn covariance_health(&self) -> (f64, f64) {
        let sym_defect = (&self.covariance - self.covariance.transpose()).norm();
        let eigen = self.covariance.clone().symmetric_eigen();
        let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        (sym_defect, min_eig)
    }
}

/// Noise and balance configuration of the filter.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanParams {
    /// Process-noise covariance, `2m x 2m`.
    pub process_noise: DMatrix<f64>,
    /// Observation covariance, `2m x 2m`; only the top-left block enters
    /// the position observation.
    pub observation_noise: DMatrix<f64>,
    /// Balance between the global and personal bests (`m x m`, entries in
    /// `[0, 1]`): the observation is `(I - Q) pbest + Q gbest`.
    pub balance: DMatrix<f64>,
    pub lambda_g: f64,
    pub lambda_b: f64,
}

impl KalmanParams {
    /// Scaled-identity heuristics: `0.1 I` process and observation noise,
    /// even balance, `lambda_g = lambda_b = 0.3`.
    pub fn for_dim(m: usize) -> Self {
        let mut observation_noise = DMatrix::zeros(2 * m, 2 * m);
        for k in 0..m {
            observation_noise[(k, k)] = 0.1;
        }
        Self {
            process_noise: DMatrix::identity(2 * m, 2 * m) * 0.1,
            observation_noise,
            balance: DMatrix::identity(m, m) * 0.5,
            lambda_g: 0.3,
            lambda_b: 0.3,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.process_noise.nrows() != 2 * m || self.observation_noise.nrows() != 2 * m {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                got: self.process_noise.nrows(),
            });
        }
        if self.balance.nrows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.balance.nrows(),
            });
        }
        Ok(())
    }
}

/// Fitness-proportional blend weights for the product update:
/// `fresh_fraction` of the posterior mass goes to the new gbest/pbest
/// information, split in proportion to their weights.
pub fn lambdas_from_weights(w_gbest: f64, w_pbest: f64, fresh_fraction: f64) -> Result<(f64, f64)> {
    if !(w_gbest > 0.0 && w_pbest > 0.0) {
        return Err(Error::InvalidParameter(
            "best weights must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&fresh_fraction) {
        return Err(Error::InvalidParameter(
            "fresh_fraction must lie in [0, 1]".into(),
        ));
    }
    let total = w_gbest + w_pbest;
    Ok((
        fresh_fraction * w_gbest / total,
        fresh_fraction * w_pbest / total,
    ))
}

fn transition_matrix(m: usize) -> DMatrix<f64> {
    let mut f = DMatrix::identity(2 * m, 2 * m);
    for k in 0..m {
        f[(k, m + k)] = 1.0;
    }
    f
}

fn invert_or_regularize(mut s: DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    if let Some(inv) = s.clone().try_inverse() {
        if inv.iter().all(|x| x.is_finite()) {
            return Ok(inv);
        }
    }
    log::warn!("singular matrix in {context}; regularizing with 1e-10 * I");
    for k in 0..s.nrows() {
        s[(k, k)] += 1e-10;
    }
    s.try_inverse().ok_or(Error::SingularMatrix(context))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m = (&*m + t) * 0.5;
}

/// Deterministic filter pass: gain, blended observation, estimate and
/// covariance update. Returns the next particle state without sampling.
pub fn kalman_filter_update(
    kstate: &KalmanParticleState,
    gbest: &[f64],
    pbest: &[f64],
    params: &KalmanParams,
) -> Result<KalmanParticleState> {
    let m = kstate.dim();
    params.validate(m)?;
    if gbest.len() != m || pbest.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: gbest.len(),
        });
    }
    let f = transition_matrix(m);

    // predicted covariance F W F^T + W_y
    let predicted = &f * &kstate.covariance * f.transpose() + &params.process_noise;
    // innovation covariance: position block plus the observation block
    let innovation_cov = predicted.view((0, 0), (m, m)).clone_owned()
        + params.observation_noise.view((0, 0), (m, m)).clone_owned();
    let s_inv = invert_or_regularize(innovation_cov, "kalman innovation")?;
    // gain: predicted H^T S^-1, i.e. the left m columns of `predicted`
    let gain = predicted.view((0, 0), (2 * m, m)).clone_owned() * &s_inv;

    // blended observation (I - Q) pbest + Q gbest
    let gb = DVector::from_column_slice(gbest);
    let pb = DVector::from_column_slice(pbest);
    let observation = &pb - &params.balance * &pb + &params.balance * &gb;

    let predicted_estimate = &f * &kstate.estimate;
    let innovation = observation - predicted_estimate.rows(0, m).clone_owned();
    let estimate = &predicted_estimate + &gain * innovation;

    // (I - K H) predicted, then re-symmetrized against drift
    let h_predicted = predicted.rows(0, m).clone_owned();
    let mut covariance = &predicted - &gain * &h_predicted;
    symmetrize(&mut covariance);

    Ok(KalmanParticleState {
        estimate,
        covariance,
    })
}

/// Draw the next position: a sample from `Normal(F * estimate,
/// covariance)` with the velocity half of the sample discarded.
pub fn sample_next_position(
    kstate: &KalmanParticleState,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let m = kstate.dim();
    let f = transition_matrix(m);
    let mean = &f * &kstate.estimate;
    let max_diag = (0..2 * m)
        .map(|k| kstate.covariance[(k, k)])
        .fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return Ok(mean.as_slice()[..m].to_vec());
    }
    let mut cov = kstate.covariance.clone();
    symmetrize(&mut cov);
    let mut jitter = 0.0;
    let chol = loop {
        match nalgebra::Cholesky::new(cov.clone()) {
            Some(c) => break c,
            None => {
                jitter = if jitter == 0.0 { 1e-10 * max_diag.max(1.0) } else { jitter * 100.0 };
                if jitter > 1e6 {
                    return Err(Error::SingularMatrix("kalman sampling covariance"));
                }
                for k in 0..2 * m {
                    cov[(k, k)] += jitter;
                }
            }
        }
    };
    let z = DVector::from_iterator(2 * m, (0..2 * m).map(|_| rng.next_gaussian()));
    let sample = mean + chol.l() * z;
    Ok(sample.as_slice()[..m].to_vec())
}

/// Full step for one particle: filter pass plus position sampling.
pub fn kalman_step(
    kstate: &KalmanParticleState,
    gbest: &[f64],
    pbest: &[f64],
    params: &KalmanParams,
    rng: &mut RngStream,
) -> Result<(KalmanParticleState, Vec<f64>)> {
    let next = kalman_filter_update(kstate, gbest, pbest, params)?;
    let position = sample_next_position(&next, rng)?;
    Ok((next, position))
}

/// Blend the running Gaussian posterior with the gbest/pbest component
/// Gaussians: precision-weighted combination of the three.
pub fn product_gaussian_update(
    x_bar: &DVector<f64>,
    v_bar: &DMatrix<f64>,
    gbest: &DVector<f64>,
    v_g: &DMatrix<f64>,
    pbest: &DVector<f64>,
    v_b: &DMatrix<f64>,
    lambda_g: f64,
    lambda_b: f64,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let rest = 1.0 - lambda_g - lambda_b;
    if rest < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "lambda_g + lambda_b must not exceed 1, got {}",
            lambda_g + lambda_b
        )));
    }
    let v_new = v_bar * rest + v_g * lambda_g + v_b * lambda_b;
    let v_new_inv = v_new
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix("product_gaussian_update precision"))?;
    let rhs = v_bar * x_bar * rest + v_g * gbest * lambda_g + v_b * pbest * lambda_b;
    Ok((v_new_inv * rhs, v_new))
}

/// Position-only filter update written without the stacked state.
pub fn reduced_kalman_update(
    x_bar: &DVector<f64>,
    v_bar: &DMatrix<f64>,
    gbest: &DVector<f64>,
    pbest: &DVector<f64>,
    v_xx: &DMatrix<f64>,
    v_gg: &DMatrix<f64>,
    q_x: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let m = x_bar.len();
    let a = v_bar + v_xx;
    let s_inv = (v_bar + v_gg)
        .try_inverse()
        .ok_or(Error::SingularMatrix("reduced kalman innovation"))?;
    let b = &s_inv * &a;
    let v_new = &a - &a * &s_inv * &a;
    let eye = DMatrix::identity(m, m);
    let x_new = (&eye - &b) * x_bar + &b * q_x * gbest + &b * (&eye - q_x) * pbest;
    Ok((x_new, v_new))
}

/// Inputs that make [`product_gaussian_update`] coincide with
/// [`reduced_kalman_update`]: the reduced update's three matrix
/// coefficients are split into `(1 - lambda_g - lambda_b) V`,
/// `lambda_g V^g` and `lambda_b V^b` for the chosen lambdas.
pub fn product_equivalent_inputs(
    v_bar: &DMatrix<f64>,
    v_xx: &DMatrix<f64>,
    v_gg: &DMatrix<f64>,
    q_x: &DMatrix<f64>,
    lambda_g: f64,
    lambda_b: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let rest = 1.0 - lambda_g - lambda_b;
    if !(lambda_g > 0.0 && lambda_b > 0.0 && rest > 0.0) {
        return Err(Error::InvalidParameter(
            "lambdas must be positive with lambda_g + lambda_b < 1".into(),
        ));
    }
    let m = v_bar.nrows();
    let a = v_bar + v_xx;
    let s_inv = (v_bar + v_gg)
        .try_inverse()
        .ok_or(Error::SingularMatrix("equivalence mapping"))?;
    let b = &s_inv * &a;
    let v_new = &a - &a * &s_inv * &a;
    let eye = DMatrix::identity(m, m);
    let v_bar_eff = &v_new * (&eye - &b) / rest;
    let v_g = &v_new * &b * q_x / lambda_g;
    let v_b = &v_new * &b * (&eye - q_x) / lambda_b;
    Ok((v_bar_eff, v_g, v_b))
}
