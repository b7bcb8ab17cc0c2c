//! Fitness-to-weight mapping.
//!
//! A raw objective value becomes a strictly positive weight that scales a
//! record's influence on the posterior: the raw value itself when
//! maximizing, its reciprocal when minimizing, with an epsilon floor so
//! exact zeros (Sphere at the origin) stay finite. An optional monotone
//! transform can reshape raw values before weighting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Optional monotone reshaping of raw fitness before weighting.
///
/// Both maps are applied to `max(raw, 0)` so they stay monotone and real
/// on the floored domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneTransform {
    Sqrt,
    Log1p,
}

impl std::str::FromStr for MonotoneTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(MonotoneTransform::Sqrt),
            "log1p" => Ok(MonotoneTransform::Log1p),
            other => Err(Error::InvalidParameter(format!(
                "unknown transform `{other}` (expected sqrt or log1p)"
            ))),
        }
    }
}

impl MonotoneTransform {
    fn apply(self, raw: f64) -> f64 {
        let x = raw.max(0.0);
        match self {
            MonotoneTransform::Sqrt => x.sqrt(),
            MonotoneTransform::Log1p => x.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessWeightSpec {
    pub direction: Direction,
    pub epsilon: f64,
    pub transform: Option<MonotoneTransform>,
}

impl Default for FitnessWeightSpec {
    fn default() -> Self {
        Self {
            direction: Direction::Minimize,
            epsilon: 1e-12,
            transform: None,
        }
    }
}

/// Strictly positive, finite weight for a raw fitness value.
///
/// Maximize: `max(t(raw), epsilon)`. Minimize: `1 / max(t(raw), epsilon)`.
pub fn fitness_weight(raw: f64, spec: &FitnessWeightSpec) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::NonFiniteFitness {
            particle: usize::MAX,
            value: raw,
        });
    }
    let transformed = match spec.transform {
        Some(t) => t.apply(raw),
        None => raw,
    };
    let floored = transformed.max(spec.epsilon);
    Ok(match spec.direction {
        Direction::Maximize => floored,
        Direction::Minimize => 1.0 / floored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(direction: Direction) -> FitnessWeightSpec {
        FitnessWeightSpec {
            direction,
            ..FitnessWeightSpec::default()
        }
    }

    #[test]
    fn maximize_is_identity_above_floor() {
        assert_eq!(fitness_weight(2.0, &spec(Direction::Maximize)).unwrap(), 2.0);
    }

    #[test]
    fn minimize_is_reciprocal() {
        assert_eq!(fitness_weight(4.0, &spec(Direction::Minimize)).unwrap(), 0.25);
    }

    #[test]
    fn zero_raw_floors_to_epsilon() {
        let w = fitness_weight(0.0, &spec(Direction::Minimize)).unwrap();
        assert_eq!(w, 1e12);
        assert!(w.is_finite());
    }

    #[test]
    fn small_value_sweep_stays_finite_and_positive() {
        // exhaustive sweep over tiny and negative raw values near the floor
        let s = spec(Direction::Minimize);
        for i in -60..=60 {
            let raw = (i as f64) * 1e-13;
            let w = fitness_weight(raw, &s).unwrap();
            assert!(w.is_finite() && w > 0.0, "raw={raw} gave weight {w}");
        }
    }

    #[test]
    fn nan_raw_is_an_error() {
        assert!(fitness_weight(f64::NAN, &spec(Direction::Minimize)).is_err());
        assert!(fitness_weight(f64::INFINITY, &spec(Direction::Maximize)).is_err());
    }

    proptest! {
        // monotone increasing for maximize, decreasing for minimize
        #[test]
        fn weight_is_monotone(a in -1e6_f64..1e6, b in -1e6_f64..1e6) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let wmax_lo = fitness_weight(lo, &spec(Direction::Maximize)).unwrap();
            let wmax_hi = fitness_weight(hi, &spec(Direction::Maximize)).unwrap();
            prop_assert!(wmax_lo <= wmax_hi);
            let wmin_lo = fitness_weight(lo, &spec(Direction::Minimize)).unwrap();
            let wmin_hi = fitness_weight(hi, &spec(Direction::Minimize)).unwrap();
            prop_assert!(wmin_lo >= wmin_hi);
        }
    }

    #[test]
    fn monotone_over_grid_of_1000() {
        let s_max = spec(Direction::Maximize);
        let s_min = spec(Direction::Minimize);
        let mut prev_max = f64::NEG_INFINITY;
        let mut prev_min = f64::INFINITY;
        for i in 0..1000 {
            let raw = -50.0 + 0.1 * i as f64;
            let wmax = fitness_weight(raw, &s_max).unwrap();
            let wmin = fitness_weight(raw, &s_min).unwrap();
            assert!(wmax >= prev_max);
            assert!(wmin <= prev_min);
            prev_max = wmax;
            prev_min = wmin;
        }
    }

    #[test]
    fn transform_applies_before_weighting() {
        let s = FitnessWeightSpec {
            direction: Direction::Minimize,
            epsilon: 1e-12,
            transform: Some(MonotoneTransform::Sqrt),
        };
        assert_eq!(fitness_weight(16.0, &s).unwrap(), 0.25);
    }
}
