//! Partition gadgets: instances whose delivery (and, undirected, convergecast
//! and broadcast) feasibility encodes whether a weight multiset splits into
//! two halves of equal sum.
//!
//! Directed form, with `E` the total weight: every middle node `x` holds one
//! agent with energy `w(x)` and has arcs `x -> s` of length `w(x)/3` and
//! `x -> a` of length 0; the spine is `s -> a` (`E/3`) then `a -> t` (`E/2`).
//! The undirected form adds `E` to every middle energy and to both edges at
//! each middle node, and puts an agent (energy 0) at `s`, `a` and `t`.

use serde::Serialize;

use crate::error::ModelError;
use crate::model::{Agent, GraphInstance, Network, NodeId, Point, Task};
use crate::rational::Rational;

/// Nodes of a gadget by role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Roles {
    pub s: NodeId,
    pub a: NodeId,
    pub t: NodeId,
    /// One per weight, in input order.
    pub middle: Vec<NodeId>,
}

impl Roles {
    pub fn len(&self) -> usize {
        self.middle.len() + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReduction {
    pub weights: Vec<u64>,
    pub total: u64,
    pub instance: GraphInstance,
    pub roles: Roles,
}

impl PartitionReduction {
    /// The same gadget with every length and energy multiplied by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let mut net = Network::new();
        for l in self.instance.net.labels() {
            net.add_node(l.clone());
        }
        for e in self.instance.net.edges() {
            net.add_edge(e.u, e.v, &e.length * c, e.directed);
        }
        let agents = self.instance.agents.iter().map(|a| Agent { node: a.node, energy: &a.energy * c }).collect();
        PartitionReduction {
            instance: GraphInstance::new(net, agents).expect("scaling keeps signs"),
            ..self.clone()
        }
    }

    fn node(&self, u: NodeId) -> Point {
        Point::node(self.instance.net.label(u))
    }

    pub fn delivery(&self) -> Task {
        Task::Delivery { source: self.node(self.roles.s), target: self.node(self.roles.t) }
    }

    /// Meeting point for convergecast.
    pub fn convergecast_point(&self) -> Point {
        self.node(self.roles.t)
    }

    /// Agent at `s`, the broadcast source; only the undirected form has one.
    pub fn broadcast_source(&self) -> Option<usize> {
        self.instance.agents.iter().position(|a| a.node == self.roles.s)
    }
}

fn build(weights: &[u64], undirected: bool) -> Result<PartitionReduction, ModelError> {
    if weights.is_empty() {
        return Err(ModelError::NoAgents);
    }
    let total: u64 = weights.iter().sum();
    let e = Rational::from_int(total as i64);
    let third = Rational::new(1, 3);
    let pad = if undirected { e.clone() } else { Rational::zero() };
    let mut net = Network::new();
    let s = net.add_node("s");
    let a = net.add_node("a");
    let t = net.add_node("t");
    net.add_edge(s, a, &e * &third, !undirected);
    net.add_edge(a, t, e.half(), !undirected);
    let mut agents = Vec::new();
    let mut middle = Vec::with_capacity(weights.len());
    for (k, &w) in weights.iter().enumerate() {
        let w = Rational::from_int(w as i64);
        let x = net.add_node(format!("x{k}"));
        net.add_edge(x, s, &(&w * &third) + &pad, !undirected);
        net.add_edge(x, a, pad.clone(), !undirected);
        agents.push(Agent { node: x, energy: &w + &pad });
        middle.push(x);
    }
    if undirected {
        for u in [s, a, t] {
            agents.push(Agent { node: u, energy: Rational::zero() });
        }
    }
    Ok(PartitionReduction {
        weights: weights.to_vec(),
        total,
        instance: GraphInstance::new(net, agents)?,
        roles: Roles { s, a, t, middle },
    })
}

/// Directed gadget; the task is delivery from `s` to `t`.
pub fn build_digraph_reduction(weights: &[u64]) -> Result<PartitionReduction, ModelError> {
    build(weights, false)
}

/// Undirected gadget; delivery from `s` to `t`, convergecast at `t` and
/// broadcast from the agent at `s` are all equivalent to the partition.
pub fn build_graph_reduction(weights: &[u64]) -> Result<PartitionReduction, ModelError> {
    build(weights, true)
}

/// Whether the agents of `first` walking to `s` and the rest to `a` deliver:
/// `2α/3 >= E/3` and `α/3 + 2β/3 >= E/2`.
pub fn analytic_feasibility(first: &[u64], second: &[u64]) -> bool {
    let alpha: u64 = first.iter().sum();
    let beta: u64 = second.iter().sum();
    let total = alpha + beta;
    // scaled by 6
    4 * alpha >= 2 * total && 2 * alpha + 4 * beta >= 3 * total
}

/// Whether some split of `weights` passes [`analytic_feasibility`].
pub fn reduction_feasible(weights: &[u64]) -> bool {
    assert!(weights.len() < 64, "exhaustive split search");
    (0u64..1 << weights.len()).any(|mask| {
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for (k, &w) in weights.iter().enumerate() {
            if mask >> k & 1 == 1 {
                first.push(w);
            } else {
                second.push(w);
            }
        }
        analytic_feasibility(&first, &second)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn digraph_lengths() {
        let r = build_digraph_reduction(&[1, 1]).unwrap();
        let net = &r.instance.net;
        let len = |u: NodeId, v: NodeId| {
            net.edges().iter().find(|e| e.u == u && e.v == v).map(|e| e.length.clone()).unwrap()
        };
        assert_eq!(r.total, 2);
        for &x in &r.roles.middle {
            assert_eq!(len(x, r.roles.s), q!(1, 3));
            assert_eq!(len(x, r.roles.a), q!(0));
        }
        assert_eq!(len(r.roles.s, r.roles.a), q!(2, 3));
        assert_eq!(len(r.roles.a, r.roles.t), q!(1));
        assert!(net.edges().iter().all(|e| e.directed));
        assert_eq!(r.roles.len(), 5);
        assert_eq!(r.instance.agents.len(), 2);
        assert_eq!(build_digraph_reduction(&[2]).unwrap().roles.middle.len(), 1);
        assert!(build_digraph_reduction(&[]).is_err());
    }

    #[test]
    fn graph_lengths() {
        let r = build_graph_reduction(&[1, 1]).unwrap();
        let net = &r.instance.net;
        let x = r.roles.middle[0];
        let xs = net.edges().iter().find(|e| e.u == x && e.v == r.roles.s).unwrap();
        assert_eq!(xs.length, q!(7, 3));
        assert!(!xs.directed);
        assert_eq!(r.instance.agents[0].energy, q!(3));
        assert_eq!(r.instance.agents.len(), 5);
        let d = build_digraph_reduction(&[1, 1]).unwrap();
        assert_eq!(net.node_count(), d.instance.net.node_count());
        assert_eq!(net.edge_count(), d.instance.net.edge_count());
        assert_eq!(r.broadcast_source(), Some(2));
    }

    #[test]
    fn splits() {
        assert!(analytic_feasibility(&[1], &[1]));
        assert!(!analytic_feasibility(&[1], &[2]));
        assert!(!analytic_feasibility(&[2], &[1]));
        assert!(analytic_feasibility(&[3], &[1, 2]));
        assert!(!reduction_feasible(&[1, 2]));
        assert!(reduction_feasible(&[1, 2, 3]));
    }
}
