mod common;

use etop::ga::fitness;
use etop::oracle::{solve_exact, OracleLimits};
use etop::{Instance, Solution};

#[test]
fn oracle_matches_naive_enumeration() {
    for seed in 0..30 {
        let n = 1 + seed as usize % 6;
        let k = 1 + seed as usize % 2;
        let inst = common::small_instance(n, k, 700 + seed);
        let (naive, _) = common::naive_optimum(&inst);
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(exact.best_reward, naive, "seed {seed}");
        assert!(exact.proven_optimal);
    }
}

/// Appends every unrouted target to the last route, which keeps the
/// collected prefixes intact.
fn complete(inst: &Instance, sol: &Solution) -> Solution {
    let mut routes = sol.routes.clone();
    let routed: Vec<usize> = routes.iter().flatten().copied().collect();
    let last = routes.last_mut().unwrap();
    last.extend((1..=inst.n_targets()).filter(|id| !routed.contains(id)));
    Solution::new(routes)
}

#[test]
fn fitness_of_encoded_optimum_equals_oracle_reward() {
    for seed in 0..20 {
        let inst = common::small_instance(8, 2, 1500 + seed);
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let ev = inst.evaluate(&exact.best_solution).unwrap();
        assert!(ev.is_feasible(), "oracle solution truncated, seed {seed}");
        let enc = inst.encode(&complete(&inst, &exact.best_solution)).unwrap();
        assert_eq!(
            fitness(&inst, &enc).unwrap(),
            exact.best_reward,
            "seed {seed}"
        );
    }
}
