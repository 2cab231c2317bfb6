//! Exact solver for small instances.
//!
//! Depth-first branch and bound over partial solutions. UAVs are processed
//! one at a time (fastest first); at every node the current UAV either
//! appends a deadline-feasible unused target or closes its route and hands
//! over to the next UAV. A node is pruned when its reward plus the rewards of
//! all unused targets that some open UAV could still serve cannot beat the
//! incumbent. Among UAVs with equal speed only route sets whose first
//! targets increase with UAV order are explored.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Solution};
use crate::solver::SolveResult;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleLimits {
    pub max_targets: usize,
    pub max_uavs: usize,
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_targets: 10,
            max_uavs: 3,
            node_budget: 200_000_000,
        }
    }
}

// Slack on the pruning test so float noise in the running sums never cuts
// a branch that could tie or beat the incumbent.
const PRUNE_SLACK: f64 = 1e-9;

struct Search<'a> {
    instance: &'a Instance,
    /// Processing order: slot -> UAV index.
    order: Vec<usize>,
    /// `reach_from_depot[slot][j - 1]`: UAV of `slot` can serve `j` directly.
    reach_from_depot: Vec<Vec<bool>>,
    /// Whether a later slot than `slot` can serve `j` from the depot.
    later_reach: Vec<Vec<bool>>,
    same_speed_as_prev: Vec<bool>,
    by_reward: Vec<usize>,
    used: Vec<bool>,
    routes: Vec<Vec<usize>>,
    best_reward: f64,
    best_routes: Vec<Vec<usize>>,
    history: Vec<f64>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn bound(&self, slot: usize, at: usize, time: f64) -> f64 {
        let inst = self.instance;
        let uav = self.order[slot];
        inst.targets()
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.used[*i])
            .filter(|(i, _)| {
                self.later_reach[slot][*i]
                    || inst.completion_time(uav, at, time, i + 1) <= inst.t_max()
            })
            .map(|(_, t)| t.reward)
            .sum()
    }

    fn dfs(&mut self, slot: usize, at: usize, time: f64, reward: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if reward > self.best_reward {
            self.best_reward = reward;
            self.best_routes.clone_from(&self.routes);
            self.history.push(reward);
        }
        if reward + self.bound(slot, at, time) < self.best_reward - PRUNE_SLACK {
            return;
        }

        let inst = self.instance;
        let uav = self.order[slot];
        // canonical order among equal-speed UAVs: first targets increase
        let min_first = if self.routes[slot].is_empty() && self.same_speed_as_prev[slot] {
            match self.routes[slot - 1].first() {
                Some(&f) => Some(f),
                None => Some(usize::MAX),
            }
        } else {
            None
        };

        for idx in 0..self.by_reward.len() {
            let j = self.by_reward[idx];
            if self.used[j - 1] || min_first.is_some_and(|m| j <= m) {
                continue;
            }
            let done = inst.completion_time(uav, at, time, j);
            if done > inst.t_max() {
                continue;
            }
            self.used[j - 1] = true;
            self.routes[slot].push(j);
            self.dfs(slot, j, done, reward + inst.targets()[j - 1].reward);
            self.routes[slot].pop();
            self.used[j - 1] = false;
        }

        if slot + 1 < self.order.len() {
            self.dfs(slot + 1, 0, 0.0, reward);
        }
    }
}

pub fn solve_exact(instance: &Instance, limits: &OracleLimits) -> Result<SolveResult> {
    let n = instance.n_targets();
    let k = instance.n_uavs();
    if n > limits.max_targets || k > limits.max_uavs {
        return Err(Error::TooLarge(format!(
            "{n} targets / {k} UAVs exceeds limits of {} / {}",
            limits.max_targets, limits.max_uavs
        )));
    }
    let start = Instant::now();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| instance.speeds()[b].total_cmp(&instance.speeds()[a]));
    let reach_from_depot: Vec<Vec<bool>> = order
        .iter()
        .map(|&uav| {
            (1..=n)
                .map(|j| instance.completion_time(uav, 0, 0.0, j) <= instance.t_max())
                .collect()
        })
        .collect();
    let mut later_reach = vec![vec![false; n]; k];
    for slot in (0..k.saturating_sub(1)).rev() {
        later_reach[slot] = (0..n)
            .map(|i| later_reach[slot + 1][i] || reach_from_depot[slot + 1][i])
            .collect();
    }
    let same_speed_as_prev = (0..k)
        .map(|s| s > 0 && instance.speeds()[order[s]] == instance.speeds()[order[s - 1]])
        .collect();
    let mut by_reward: Vec<usize> = (1..=n).collect();
    by_reward.sort_by(|&a, &b| {
        instance.targets()[b - 1]
            .reward
            .total_cmp(&instance.targets()[a - 1].reward)
    });

    let mut search = Search {
        instance,
        order,
        reach_from_depot,
        later_reach,
        same_speed_as_prev,
        by_reward,
        used: vec![false; n],
        routes: vec![Vec::new(); k],
        best_reward: 0.0,
        best_routes: vec![Vec::new(); k],
        history: vec![0.0],
        nodes: 0,
        budget: limits.node_budget,
        exhausted: false,
    };
    search.dfs(0, 0, 0.0, 0.0);
    debug_assert!(search.reach_from_depot.len() == k);

    let mut routes = vec![Vec::new(); k];
    for (slot, &uav) in search.order.iter().enumerate() {
        routes[uav] = std::mem::take(&mut search.best_routes[slot]);
    }
    let best_solution = Solution::new(routes);
    let evaluation = instance.evaluate(&best_solution)?;
    let result = SolveResult {
        best_solution,
        best_reward: evaluation.total_reward,
        wall_time: start.elapsed().as_secs_f64(),
        iterations_run: search.nodes.min(limits.node_budget),
        reward_history: search.history,
        proven_optimal: !search.exhausted,
    };
    if search.exhausted {
        return Err(Error::BudgetExceeded {
            budget: limits.node_budget,
            best: Box::new(result),
        });
    }
    Ok(result)
}
