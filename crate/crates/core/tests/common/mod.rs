#![allow(dead_code)]

use etop::gen::{generate, GenParams};
use etop::{Instance, Solution};

/// Unpruned enumeration: every assignment of targets to UAVs (or to no
/// UAV), and every visiting order within each UAV. Only for tiny instances.
pub fn naive_optimum(instance: &Instance) -> (f64, Solution) {
    let n = instance.n_targets();
    let k = instance.n_uavs();
    let mut best = (0.0, Solution::empty(k));
    let total = (k + 1).pow(n as u32);
    for code in 0..total {
        let mut sets = vec![Vec::new(); k];
        let mut c = code;
        for id in 1..=n {
            let slot = c % (k + 1);
            c /= k + 1;
            if slot < k {
                sets[slot].push(id);
            }
        }
        let orders: Vec<Vec<Vec<usize>>> = sets.iter().map(|s| permutations(s)).collect();
        let mut idx = vec![0; k];
        loop {
            let routes: Vec<Vec<usize>> = (0..k).map(|u| orders[u][idx[u]].clone()).collect();
            let sol = Solution::new(routes);
            let r = instance.evaluate(&sol).unwrap().total_reward;
            if r > best.0 {
                best = (r, sol);
            }
            let mut u = 0;
            while u < k {
                idx[u] += 1;
                if idx[u] < orders[u].len() {
                    break;
                }
                idx[u] = 0;
                u += 1;
            }
            if u == k {
                break;
            }
        }
    }
    best
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub fn small_instance(n: usize, k: usize, seed: u64) -> Instance {
    generate(&GenParams {
        n_targets: n,
        n_uavs: k,
        seed,
        ..GenParams::default()
    })
    .unwrap()
}
