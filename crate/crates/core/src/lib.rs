//! Particle swarm optimization with pluggable update rules and a
//! benchmark harness.
//!
//! The update rules share one swarm representation and one deterministic
//! randomness contract. Velocity-based rules (standard, constricted) sit
//! next to distribution-based ones (bare bones, Kalman) and the
//! posterior-gradient family, which ascends the log of a fitness-weighted
//! posterior over optimum locations and generalizes the others; a kernel
//! extension transports the posterior machinery into a feature space. The
//! `bench` module reproduces the nine-function benchmark protocol with
//! seeded repeated runs, mean/sigma tables, and pairwise Welch t-tests.

pub mod algorithm;
pub mod barebones;
pub mod bench;
pub mod bounds;
pub mod classic;
pub mod error;
pub mod fitness;
pub mod gaussian;
pub mod history;
pub mod kalman;
pub mod kernel;
pub mod objectives;
pub mod rng;
pub mod swarm;
pub mod vecmath;

pub use algorithm::{AlgorithmConfig, AlgorithmKind, AlgorithmRun, Overrides};
pub use bounds::{clamp_to_bounds, Bounds};
pub use error::{Error, Result};
pub use fitness::{fitness_weight, Direction, FitnessWeightSpec, MonotoneTransform};
pub use history::{EvalRecord, IterationGroup, PosteriorHistory};
pub use objectives::{bounds_for, bounds_of, Objective, ObjectiveId};
pub use rng::{cell_seed, run_seed, RngStream, RUN_SEED_STRIDE};
pub use swarm::{init_swarm, stop_check, update_bests, BestUpdate, Particle, SwarmState};
