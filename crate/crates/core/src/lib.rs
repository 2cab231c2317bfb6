//! Solvers for the extended Team Orienteering Problem: a fleet of UAVs with
//! individual flight speeds leaves a common depot and collects rewards from
//! targets, each of which needs a service time, before a global deadline.
//! Routes are open (no return leg to the depot).
//!
//! The crate provides the problem model and evaluator ([`model`]), a seeded
//! instance generator ([`gen`]), three metaheuristics ([`ga`], [`aco`],
//! [`pso`]), an exact branch-and-bound solver for small instances
//! ([`oracle`]) and a repeated-run benchmark harness ([`bench`]).

pub mod aco;
pub mod bench;
mod error;
pub mod ga;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod pso;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Encoding, Evaluation, Instance, Point, Solution, Target};
pub use solver::{Algorithm, SolveResult};
