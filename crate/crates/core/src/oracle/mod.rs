//! Independent checking: a schedule validator and a brute-force search over
//! discretized configurations, for tiny instances.

mod search;
mod validate;

pub use search::{
    max_surplus, oracle_broadcast_set, search_convergecast_at, search_feasible, SearchConfig, SearchOutcome, SurplusOutcome,
};
pub use validate::{
    validate_line, validate_line_agents, validate_network, validate_schedule, EdgeSeg, Geometry, LineGeometry, NetworkGeometry,
    ValidationReport, Violation,
};

/// Whether `weights` split into two parts of equal sum.
pub fn partition_exists(weights: &[u64]) -> bool {
    let total: u64 = weights.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    reach[0] = true;
    for &w in weights {
        let w = w as usize;
        for s in (w..=half).rev() {
            reach[s] |= reach[s - w];
        }
    }
    reach[half]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions() {
        assert!(partition_exists(&[1, 2, 3]));
        assert!(!partition_exists(&[1, 2, 4]));
        assert!(partition_exists(&[]));
        assert!(!partition_exists(&[2]));
        assert!(partition_exists(&[0]));
    }
}
