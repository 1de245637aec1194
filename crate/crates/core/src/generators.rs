//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Agent, LineInstance, Network, TreeInstance};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineParams {
    pub agents: usize,
    /// Gaps between consecutive agents are drawn from `1..=max_gap`.
    pub max_gap: i64,
    /// Energies are drawn from `0..=max_energy`.
    pub max_energy: i64,
}

pub fn random_line(params: &LineParams, seed: u64) -> LineInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.agents.max(1);
    let mut positions = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    let mut x = 0i64;
    for i in 0..n {
        if i > 0 {
            x += rng.gen_range(1..=params.max_gap.max(1));
        }
        positions.push(Rational::from_int(x));
        energies.push(Rational::from_int(rng.gen_range(0..=params.max_energy.max(0))));
    }
    LineInstance::new(positions, energies).expect("increasing positions")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeParams {
    pub nodes: usize,
    pub agents: usize,
    /// Edge lengths are drawn from `1..=max_length`.
    pub max_length: i64,
    pub max_energy: i64,
}

/// Random recursive tree: node `k` hangs below a uniformly chosen earlier
/// node. Agents sit at uniformly chosen nodes, several per node allowed.
pub fn random_tree(params: &TreeParams, seed: u64) -> TreeInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = params.nodes.max(1);
    let mut net = Network::new();
    for k in 0..nodes {
        net.add_node(format!("n{k}"));
    }
    for k in 1..nodes {
        let p = rng.gen_range(0..k);
        let d = rng.gen_range(1..=params.max_length.max(1));
        net.add_edge(p, k, Rational::from_int(d), false);
    }
    let agents = (0..params.agents)
        .map(|_| Agent {
            node: rng.gen_range(0..nodes),
            energy: Rational::from_int(rng.gen_range(0..=params.max_energy.max(0))),
        })
        .collect();
    TreeInstance::new(net, agents).expect("random recursive trees are trees")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let p = LineParams { agents: 20, max_gap: 5, max_energy: 9 };
        assert_eq!(random_line(&p, 7), random_line(&p, 7));
        assert_ne!(random_line(&p, 7), random_line(&p, 8));
        let t = TreeParams { nodes: 9, agents: 4, max_length: 3, max_energy: 4 };
        assert_eq!(random_tree(&t, 1), random_tree(&t, 1));
        assert_eq!(random_tree(&t, 1).net.edge_count(), 8);
    }
}
