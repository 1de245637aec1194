//! Fixtures shared by the benchmarks.

use agentcast::generators::{random_line, random_tree, LineParams, TreeParams};
use agentcast::{LineInstance, TreeInstance};

pub const SEED: u64 = 0x5eed;

pub fn line(n: usize) -> LineInstance {
    random_line(&LineParams { agents: n, max_gap: 10, max_energy: 20 }, SEED)
}

pub fn tree(nodes: usize, agents: usize) -> TreeInstance {
    random_tree(&TreeParams { nodes, agents, max_length: 5, max_energy: 8 }, SEED)
}
