//! The nine benchmark functions with their domains, plus optional
//! Gaussian evaluation noise.
//!
//! All functions are minimization problems with non-negative values over
//! their domains. Additive constants that the 10-dimensional definitions
//! carry (Rastrigin's 100, Schwefel's 5000, Step's and Modulus-sum's 60)
//! scale with the dimension so the functions stay well-formed when run at
//! other dimensions; at `dim = 10` the values match the definitions
//! exactly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveId {
    HyperEllipsoid,
    Griewank,
    Rastrigin,
    Rosenbrock,
    Salomon,
    Schwefel,
    Sphere,
    Step,
    ModulusSum,
}

impl ObjectiveId {
    pub const ALL: [ObjectiveId; 9] = [
        ObjectiveId::HyperEllipsoid,
        ObjectiveId::Griewank,
        ObjectiveId::Rastrigin,
        ObjectiveId::Rosenbrock,
        ObjectiveId::Salomon,
        ObjectiveId::Schwefel,
        ObjectiveId::Sphere,
        ObjectiveId::Step,
        ObjectiveId::ModulusSum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveId::HyperEllipsoid => "hyper_ellipsoid",
            ObjectiveId::Griewank => "griewank",
            ObjectiveId::Rastrigin => "rastrigin",
            ObjectiveId::Rosenbrock => "rosenbrock",
            ObjectiveId::Salomon => "salomon",
            ObjectiveId::Schwefel => "schwefel",
            ObjectiveId::Sphere => "sphere",
            ObjectiveId::Step => "step",
            ObjectiveId::ModulusSum => "modulus_sum",
        }
    }

    fn half_width(self) -> f64 {
        match self {
            ObjectiveId::Griewank => 600.0,
            ObjectiveId::Rastrigin | ObjectiveId::Step | ObjectiveId::ModulusSum => 5.12,
            ObjectiveId::Schwefel => 500.0,
            ObjectiveId::Rosenbrock => 30.0,
            ObjectiveId::HyperEllipsoid | ObjectiveId::Salomon | ObjectiveId::Sphere => 100.0,
        }
    }
}

impl fmt::Display for ObjectiveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownObjective(s.to_owned()))
    }
}

/// Domain of the named function at the default dimension 10.
pub fn bounds_of(id: ObjectiveId) -> Bounds {
    bounds_for(id, 10)
}

/// Domain of the named function at an arbitrary dimension.
pub fn bounds_for(id: ObjectiveId, dim: usize) -> Bounds {
    Bounds::symmetric(id.half_width(), dim)
}

/// One benchmark function instance: formula, dimension, domain, noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub id: ObjectiveId,
    pub dim: usize,
    pub bounds: Bounds,
    pub noise_sigma: f64,
}

impl Objective {
    pub fn new(id: ObjectiveId) -> Self {
        Self::with_dim(id, 10)
    }

    pub fn with_dim(id: ObjectiveId, dim: usize) -> Self {
        Self {
            id,
            dim,
            bounds: bounds_for(id, dim),
            noise_sigma: 0.0,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    /// Noise-free value at `u`.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let d = self.dim as f64;
        Ok(match self.id {
            ObjectiveId::HyperEllipsoid => u
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let kx = (k + 1) as f64 * x;
                    kx * kx
                })
                .sum(),
            ObjectiveId::Griewank => {
                let sum: f64 = u.iter().map(|x| x * x).sum();
                let prod: f64 = u
                    .iter()
                    .enumerate()
                    .map(|(k, x)| (x / ((k + 1) as f64).sqrt()).cos())
                    .product();
                sum / 4000.0 - prod + 1.0
            }
            ObjectiveId::Rastrigin => {
                10.0 * d
                    + u.iter()
                        .map(|x| x * x - 10.0 * (2.0 * PI * x).cos())
                        .sum::<f64>()
            }
            ObjectiveId::Rosenbrock => u
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = w[0] - 1.0;
                    100.0 * a * a + b * b
                })
                .sum(),
            ObjectiveId::Salomon => {
                let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                1.0 - (2.0 * PI * r).cos() + 0.1 * r
            }
            ObjectiveId::Schwefel => {
                500.0 * d + u.iter().map(|x| -x * x.abs().sqrt().sin()).sum::<f64>()
            }
            ObjectiveId::Sphere => u.iter().map(|x| x * x).sum(),
            ObjectiveId::Step => 6.0 * d + u.iter().map(|x| x.floor()).sum::<f64>(),
            ObjectiveId::ModulusSum => 6.0 * d + u.iter().map(|x| x.abs()).sum::<f64>(),
        })
    }

    /// Value at `u` plus `Normal(0, noise_sigma)` noise; exact when sigma is 0.
    pub fn noisy_eval(&self, u: &[f64], rng: &mut RngStream) -> Result<f64> {
        let value = self.eval(u)?;
        if self.noise_sigma == 0.0 {
            Ok(value)
        } else {
            Ok(value + self.noise_sigma * rng.next_gaussian())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(id: ObjectiveId, u: &[f64]) -> f64 {
        Objective::new(id).eval(u).unwrap()
    }

    #[test]
    fn sphere_minimum_at_origin() {
        assert_eq!(at(ObjectiveId::Sphere, &[0.0; 10]), 0.0);
    }

    #[test]
    fn rastrigin_cancels_at_origin() {
        assert_eq!(at(ObjectiveId::Rastrigin, &[0.0; 10]), 0.0);
    }

    #[test]
    fn schwefel_at_origin() {
        assert_eq!(at(ObjectiveId::Schwefel, &[0.0; 10]), 5000.0);
    }

    #[test]
    fn step_floors_toward_negative_infinity() {
        assert_eq!(at(ObjectiveId::Step, &[-0.5; 10]), 50.0);
    }

    #[test]
    fn hyper_ellipsoid_at_ones() {
        // sum of k^2 for k = 1..10
        assert_eq!(at(ObjectiveId::HyperEllipsoid, &[1.0; 10]), 385.0);
    }

    #[test]
    fn rosenbrock_minimum_at_ones() {
        assert_eq!(at(ObjectiveId::Rosenbrock, &[1.0; 10]), 0.0);
    }

    #[test]
    fn salomon_on_unit_sphere() {
        let mut u = [0.0; 10];
        u[0] = 1.0;
        assert!((at(ObjectiveId::Salomon, &u) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn griewank_single_coordinate_100() {
        let mut u = [0.0; 10];
        u[0] = 100.0;
        let expected = 3.5 - 100.0_f64.cos();
        assert!((at(ObjectiveId::Griewank, &u) - expected).abs() < 1e-6);
        assert!((expected - 2.637_681_127_712_316).abs() < 1e-12);
    }

    #[test]
    fn domains_match_the_definitions() {
        assert_eq!(bounds_of(ObjectiveId::Griewank), Bounds::symmetric(600.0, 10));
        assert_eq!(bounds_of(ObjectiveId::Rosenbrock), Bounds::symmetric(30.0, 10));
        assert_eq!(bounds_of(ObjectiveId::Sphere), Bounds::symmetric(100.0, 10));
        assert_eq!(bounds_of(ObjectiveId::Schwefel), Bounds::symmetric(500.0, 10));
        assert_eq!(bounds_of(ObjectiveId::Rastrigin), Bounds::symmetric(5.12, 10));
        assert_eq!(bounds_of(ObjectiveId::Step), Bounds::symmetric(5.12, 10));
        assert_eq!(bounds_of(ObjectiveId::ModulusSum), Bounds::symmetric(5.12, 10));
        assert_eq!(bounds_of(ObjectiveId::HyperEllipsoid), Bounds::symmetric(100.0, 10));
        assert_eq!(bounds_of(ObjectiveId::Salomon), Bounds::symmetric(100.0, 10));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(Objective::new(ObjectiveId::Sphere).eval(&[0.0; 3]).is_err());
    }

    #[test]
    fn noise_free_noisy_eval_is_exact() {
        let obj = Objective::new(ObjectiveId::Sphere);
        let mut rng = RngStream::new(9);
        let u = [3.0; 10];
        assert_eq!(obj.noisy_eval(&u, &mut rng).unwrap(), obj.eval(&u).unwrap());
    }

    #[test]
    fn noisy_eval_mean_converges() {
        // Monte Carlo standard error at 1e5 draws is ~0.0032; allow 5 sigma.
        let obj = Objective::new(ObjectiveId::Sphere).with_noise(1.0);
        let mut rng = RngStream::new(11);
        let u = [2.0; 10];
        let exact = obj.eval(&u).unwrap();
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| obj.noisy_eval(&u, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - exact).abs() < 0.02, "mean {mean} vs exact {exact}");
    }

    #[test]
    fn distinct_seeds_give_distinct_noise() {
        let obj = Objective::new(ObjectiveId::Sphere).with_noise(1.0);
        let u = [1.0; 10];
        let mut a = RngStream::new(1);
        let mut b = RngStream::new(2);
        let xs: Vec<f64> = (0..4).map(|_| obj.noisy_eval(&u, &mut a).unwrap()).collect();
        let ys: Vec<f64> = (0..4).map(|_| obj.noisy_eval(&u, &mut b).unwrap()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn random_sample_invariants() {
        // non-negativity and symmetry by random sampling
        let symmetric = [
            ObjectiveId::Sphere,
            ObjectiveId::HyperEllipsoid,
            ObjectiveId::Salomon,
            ObjectiveId::ModulusSum,
            ObjectiveId::Rastrigin,
        ];
        let non_negative = [
            ObjectiveId::Sphere,
            ObjectiveId::HyperEllipsoid,
            ObjectiveId::Griewank,
            ObjectiveId::Rastrigin,
            ObjectiveId::Salomon,
            ObjectiveId::Rosenbrock,
        ];
        let mut rng = RngStream::new(123);
        for _ in 0..100_000 {
            for id in non_negative {
                let obj = Objective::with_dim(id, 3);
                let u = obj.bounds.sample_uniform(&mut rng);
                let v = obj.eval(&u).unwrap();
                assert!(v >= 0.0, "{id} < 0 at {u:?}");
                if symmetric.contains(&id) {
                    let neg: Vec<f64> = u.iter().map(|x| -x).collect();
                    let vn = obj.eval(&neg).unwrap();
                    assert!(
                        (v - vn).abs() <= 1e-9 * v.abs().max(1.0),
                        "{id} asymmetric at {u:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn step_is_piecewise_constant() {
        let obj = Objective::with_dim(ObjectiveId::Step, 4);
        let u = [1.25, -2.75, 0.0, 3.5];
        let delta = [0.5, 0.25, 0.9, 0.25];
        let shifted: Vec<f64> = u.iter().zip(&delta).map(|(x, d)| x + d).collect();
        for (x, s) in u.iter().zip(&shifted) {
            assert_eq!(x.floor(), s.floor());
        }
        assert_eq!(obj.eval(&u).unwrap(), obj.eval(&shifted).unwrap());
    }
}
