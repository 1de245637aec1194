#![allow(dead_code)]

pub mod mutate;

use agentcast::LineInstance;

/// Every line instance with at most three agents, strictly increasing
/// integer positions in [0, 4] and integer energies in [0, 4].
pub fn tiny_lines() -> Vec<LineInstance> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut positions = Vec::new();
        choose(0, n, &mut Vec::new(), &mut positions);
        for p in &positions {
            for code in 0..5usize.pow(n as u32) {
                let e: Vec<i64> = (0..n).map(|k| (code / 5usize.pow(k as u32) % 5) as i64).collect();
                out.push(LineInstance::from_ints(p, &e).unwrap());
            }
        }
    }
    out
}

fn choose(from: i64, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    for x in from..=4 {
        cur.push(x);
        choose(x + 1, left - 1, cur, out);
        cur.pop();
    }
}

/// The seeded random trees used by the tree suites: up to `max_nodes`
/// nodes, one to four agents, integer lengths in [1, 3], energies in [0, 4].
pub fn random_trees(count: u64, max_nodes: usize) -> Vec<agentcast::TreeInstance> {
    use agentcast::generators::{random_tree, TreeParams};
    (0..count)
        .map(|seed| {
            let nodes = 1 + (seed as usize * 7 + 3) % max_nodes;
            let agents = 1 + (seed as usize * 5 + 1) % 4;
            random_tree(&TreeParams { nodes, agents, max_length: 3, max_energy: 4 }, seed)
        })
        .collect()
}

/// Feasibility decided by the oracle; `None` when the budget ran out.
#[allow(dead_code)]
pub fn verdict(o: &agentcast::oracle::SearchOutcome) -> Option<bool> {
    match o {
        agentcast::oracle::SearchOutcome::Found(_) => Some(true),
        agentcast::oracle::SearchOutcome::NotFound => Some(false),
        agentcast::oracle::SearchOutcome::Exhausted => None,
    }
}
