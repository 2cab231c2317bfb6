//! Result type shared by all solvers, plus dispatch by algorithm name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aco::{solve_aco, AcoConfig};
use crate::ga::{solve_ga, GaConfig};
use crate::model::{Instance, Solution};
use crate::oracle::{solve_exact, OracleLimits};
use crate::pso::{solve_pso, PsoConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_solution: Solution,
    pub best_reward: f64,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
    pub iterations_run: u64,
    /// Best-so-far reward after each iteration.
    pub reward_history: Vec<f64>,
    /// Set only by the exact solver after a completed search.
    pub proven_optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ga,
    Aco,
    Pso,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Ga,
        Algorithm::Aco,
        Algorithm::Pso,
        Algorithm::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Aco => "aco",
            Algorithm::Pso => "pso",
            Algorithm::Exact => "exact",
        }
    }

    /// Stable numeric id used when deriving per-run seeds.
    pub fn id(self) -> u64 {
        match self {
            Algorithm::Ga => 0,
            Algorithm::Aco => 1,
            Algorithm::Pso => 2,
            Algorithm::Exact => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

/// Parameters for every solver; each section falls back to its defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfigs {
    pub ga: GaConfig,
    pub aco: AcoConfig,
    pub pso: PsoConfig,
    pub exact: OracleLimits,
}

impl SolverConfigs {
    /// Runs `algorithm` with its section of the configuration and `seed`.
    pub fn solve(
        &self,
        instance: &Instance,
        algorithm: Algorithm,
        seed: u64,
    ) -> Result<SolveResult> {
        match algorithm {
            Algorithm::Ga => solve_ga(
                instance,
                &GaConfig {
                    seed,
                    ..self.ga.clone()
                },
            ),
            Algorithm::Aco => solve_aco(
                instance,
                &AcoConfig {
                    seed,
                    ..self.aco.clone()
                },
            ),
            Algorithm::Pso => solve_pso(
                instance,
                &PsoConfig {
                    seed,
                    ..self.pso.clone()
                },
            ),
            Algorithm::Exact => solve_exact(instance, &self.exact),
        }
    }
}
