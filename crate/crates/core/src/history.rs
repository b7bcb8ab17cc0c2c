//! Windowed evaluation history backing the posterior over optimum
//! locations.
//!
//! Records are grouped by iteration; only the last `window` iteration
//! groups are retained, which bounds the posterior to the last `window`
//! positions per particle. Each group caches its total weight and its
//! weight-normalized mean position, both of which the independence-form
//! gradient consumes directly.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// One atom of the Bayesian history: a particle's evaluated position with
/// the strictly positive weight derived from its raw fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub iteration: u64,
    pub particle: usize,
    pub position: Vec<f64>,
    pub raw: f64,
    pub weight: f64,
}

/// All records of one iteration plus cached aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationGroup {
    pub iteration: u64,
    pub positions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub weight_sum: f64,
    pub weighted_mean: Vec<f64>,
}

impl IterationGroup {
    fn new(iteration: u64, positions: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidParameter(
                "iteration group must contain at least one record".into(),
            ));
        }
        let dim = positions[0].len();
        let mut weight_sum = 0.0;
        for (pos, w) in positions.iter().zip(&weights) {
            if pos.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: pos.len(),
                });
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "record weight must be positive and finite, got {w}"
                )));
            }
            weight_sum += w;
        }
        let mut weighted_mean = vec![0.0; dim];
        for (pos, w) in positions.iter().zip(&weights) {
            for (m, x) in weighted_mean.iter_mut().zip(pos) {
                *m += w * x;
            }
        }
        for m in &mut weighted_mean {
            *m /= weight_sum;
        }
        Ok(Self {
            iteration,
            positions,
            weights,
            weight_sum,
            weighted_mean,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Ring of the most recent iteration groups.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorHistory {
    groups: VecDeque<IterationGroup>,
    window: usize,
}

impl PosteriorHistory {
    pub fn new(window: usize) -> Self {
        Self {
            groups: VecDeque::new(),
            window: window.max(1),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of retained iteration groups.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> impl Iterator<Item = &IterationGroup> {
        self.groups.iter()
    }

    /// Append one iteration's records, evicting the oldest group when the
    /// window is full.
    pub fn push_iteration(
        &mut self,
        iteration: u64,
        positions: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<()> {
        if positions.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "positions and weights must have equal length".into(),
            ));
        }
        self.groups
            .push_back(IterationGroup::new(iteration, positions, weights)?);
        while self.groups.len() > self.window {
            self.groups.pop_front();
        }
        Ok(())
    }

    /// Append records that all share one iteration index.
    pub fn push_records(&mut self, records: Vec<EvalRecord>) -> Result<()> {
        let Some(first) = records.first() else {
            return Err(Error::InvalidParameter("no records to push".into()));
        };
        let iteration = first.iteration;
        if records.iter().any(|r| r.iteration != iteration) {
            return Err(Error::InvalidParameter(
                "records in one push must share an iteration index".into(),
            ));
        }
        let (positions, weights) = records
            .into_iter()
            .map(|r| (r.position, r.weight))
            .unzip();
        self.push_iteration(iteration, positions, weights)
    }
}
