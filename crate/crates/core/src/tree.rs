//! Tree algorithms: delivery along the source-target path, convergecast from
//! rerooted edge potentials, and broadcast from agent-count tables.
//!
//! Most entry points take an arbitrary [`TreeInstance`] and report answers in
//! its own node and edge ids. Internally the tree is truncated (agentless
//! leaves removed) and, for the broadcast tables, ternarized.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{ModelError, SolveError};
use crate::line::{delivery_plan, potential_step};
use crate::model::{
    Agent, AgentId, EdgeId, LineInstance, Loc, Network, NodeId, Point, Schedule, Step, TreeInstance,
};
use crate::rational::Rational;

/// Ties the nodes and edges of a derived tree back to the tree it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeRemap {
    /// Original node of every derived node (copies map to their origin).
    pub node_old: Vec<NodeId>,
    /// Original edge of every derived edge; `None` for added zero-length edges.
    pub edge_old: Vec<Option<EdgeId>>,
}

impl TreeRemap {
    pub fn identity(net: &Network) -> Self {
        TreeRemap { node_old: (0..net.node_count()).collect(), edge_old: (0..net.edge_count()).map(Some).collect() }
    }

    /// `self` maps B to A and `later` maps C to B; the result maps C to A.
    pub fn then(&self, later: &TreeRemap) -> TreeRemap {
        TreeRemap {
            node_old: later.node_old.iter().map(|&b| self.node_old[b]).collect(),
            edge_old: later.edge_old.iter().map(|e| e.and_then(|b| self.edge_old[b])).collect(),
        }
    }

    pub fn new_of_old(&self, old: NodeId) -> Option<NodeId> {
        self.node_old.iter().position(|&o| o == old)
    }

    pub fn point(&self, derived: &Network, original: &Network, p: &Point) -> Point {
        match derived.loc(p) {
            Ok(Loc::Node(u)) => original.point(&Loc::Node(self.node_old[u])),
            Ok(Loc::Edge(e, off)) => match self.edge_old[e] {
                Some(o) => original.point(&Loc::Edge(o, off)),
                // zero-length edges have no interior
                None => original.point(&Loc::Node(self.node_old[derived.edge(e).u])),
            },
            Err(_) => p.clone(),
        }
    }

    /// Rewrites a schedule on the derived tree into the original one. Agent
    /// ids are shared; repeated points along a path collapse.
    pub fn schedule(&self, derived: &Network, original: &Network, schedule: &Schedule) -> Schedule {
        let mut out = Schedule::new();
        for step in &schedule.steps {
            match step {
                Step::Move { agent, path } => {
                    let mut mapped: Vec<Point> = Vec::with_capacity(path.len());
                    for p in path {
                        let q = self.point(derived, original, p);
                        if mapped.last() != Some(&q) {
                            mapped.push(q);
                        }
                    }
                    if mapped.len() > 1 {
                        out.steps.push(Step::Move { agent: *agent, path: mapped });
                    }
                }
                Step::Transfer { from, to, amount } => out.give(*from, *to, amount.clone()),
            }
        }
        out
    }
}

/// Breadth-first order from `root` with each node's parent and parent edge.
pub(crate) fn rooted(net: &Network, root: NodeId) -> (Vec<NodeId>, Vec<Option<(NodeId, EdgeId)>>) {
    let mut parent = vec![None; net.node_count()];
    let mut seen = vec![false; net.node_count()];
    let mut order = Vec::with_capacity(net.node_count());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(e, v) in net.incident(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    (order, parent)
}

fn rebuild(tree: &TreeInstance, keep: &[bool]) -> Result<(TreeInstance, TreeRemap), SolveError> {
    let mut net = Network::new();
    let mut new_id = vec![usize::MAX; tree.net.node_count()];
    let mut node_old = Vec::new();
    for u in 0..tree.net.node_count() {
        if keep[u] {
            new_id[u] = net.add_node(tree.net.label(u));
            node_old.push(u);
        }
    }
    let mut edge_old = Vec::new();
    for (i, e) in tree.net.edges().iter().enumerate() {
        if keep[e.u] && keep[e.v] {
            net.add_edge(new_id[e.u], new_id[e.v], e.length.clone(), false);
            edge_old.push(Some(i));
        }
    }
    let agents = tree.agents.iter().map(|a| Agent { node: new_id[a.node], energy: a.energy.clone() }).collect();
    Ok((TreeInstance::new(net, agents)?, TreeRemap { node_old, edge_old }))
}

/// Removes agentless leaves until every leaf hosts an agent.
pub fn truncate(tree: &TreeInstance) -> Result<(TreeInstance, TreeRemap), SolveError> {
    if tree.agents.is_empty() {
        return Err(ModelError::NoAgents.into());
    }
    let count = tree.node_agent_count();
    let mut degree: Vec<usize> = (0..tree.net.node_count()).map(|u| tree.net.degree(u)).collect();
    let mut keep = vec![true; tree.net.node_count()];
    let mut stack: Vec<NodeId> = (0..tree.net.node_count()).filter(|&u| degree[u] <= 1 && count[u] == 0).collect();
    while let Some(u) = stack.pop() {
        if !keep[u] {
            continue;
        }
        keep[u] = false;
        for &(_, v) in tree.net.incident(u) {
            if keep[v] {
                degree[v] -= 1;
                if degree[v] <= 1 && count[v] == 0 {
                    stack.push(v);
                }
            }
        }
    }
    if keep.iter().all(|&k| k) {
        return Ok((tree.clone(), TreeRemap::identity(&tree.net)));
    }
    rebuild(tree, &keep)
}

fn fresh_label(net: &Network, taken: &HashSet<String>, base: &str, k: usize) -> String {
    let mut label = format!("{base}~{k}");
    while taken.contains(&label) || net.node_id(&label).is_ok() {
        label.push('~');
    }
    label
}

/// Splits every node of degree above three into a chain of zero-length
/// edges. Original edges keep their ids; added nodes carry no agents.
pub fn ternarize(tree: &TreeInstance) -> (TreeInstance, TreeRemap) {
    let src = &tree.net;
    if (0..src.node_count()).all(|u| src.degree(u) <= 3) {
        return (tree.clone(), TreeRemap::identity(src));
    }
    let mut net = Network::new();
    let mut node_old: Vec<NodeId> = Vec::new();
    for u in 0..src.node_count() {
        net.add_node(src.label(u));
        node_old.push(u);
    }
    // endpoint of each original edge at each side, after splitting
    let mut attach: Vec<[NodeId; 2]> = src.edges().iter().map(|e| [e.u, e.v]).collect();
    let mut chains: Vec<(NodeId, NodeId)> = Vec::new();
    let mut taken = HashSet::new();
    for u in 0..src.node_count() {
        let inc = src.incident(u);
        if inc.len() <= 3 {
            continue;
        }
        // u keeps two edges, each copy takes one, the last copy takes two
        let mut holder = u;
        let mut k = 0;
        let mut rest = &inc[2..];
        while !rest.is_empty() {
            k += 1;
            let label = fresh_label(src, &taken, src.label(u), k);
            taken.insert(label.clone());
            let c = net.add_node(label);
            node_old.push(u);
            chains.push((holder, c));
            let take = if rest.len() == 2 { 2 } else { 1 };
            for &(e, _) in &rest[..take] {
                let side = if src.edge(e).u == u { 0 } else { 1 };
                attach[e][side] = c;
            }
            rest = &rest[take..];
            holder = c;
        }
    }
    let mut edge_old = Vec::new();
    for (i, e) in src.edges().iter().enumerate() {
        net.add_edge(attach[i][0], attach[i][1], e.length.clone(), false);
        edge_old.push(Some(i));
    }
    for (a, b) in chains {
        net.add_edge(a, b, Rational::zero(), false);
        edge_old.push(None);
    }
    let out = TreeInstance::new(net, tree.agents.clone()).expect("splitting keeps a tree");
    (out, TreeRemap { node_old, edge_old })
}

/// Potentials of both orientations of every edge. `values[e][0]` is the
/// potential of the side of `edge(e).u` toward `u` (edge removed), and
/// `values[e][1]` the same for `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePotentialMap {
    pub values: Vec<[Rational; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedPotential {
    pub edge: EdgeId,
    pub from: String,
    pub to: String,
    pub value: Rational,
}

impl EdgePotentialMap {
    /// Potential of the component of `from` after removing edge `e`.
    pub fn from_side(&self, net: &Network, e: EdgeId, from: NodeId) -> &Rational {
        &self.values[e][usize::from(net.edge(e).u != from)]
    }

    pub fn listing(&self, net: &Network) -> Vec<DirectedPotential> {
        let mut out = Vec::with_capacity(2 * self.values.len());
        for (i, [a, b]) in self.values.iter().enumerate() {
            let e = net.edge(i);
            let (u, v) = (net.label(e.u).to_string(), net.label(e.v).to_string());
            out.push(DirectedPotential { edge: i, from: u.clone(), to: v.clone(), value: a.clone() });
            out.push(DirectedPotential { edge: i, from: v, to: u, value: b.clone() });
        }
        out
    }
}

/// Two-pass computation of every directed edge potential. Meant for
/// truncated trees: an agentless leaf would be charged a pointless visit.
pub fn all_edge_potentials(tree: &TreeInstance) -> EdgePotentialMap {
    let net = &tree.net;
    let energy = tree.node_energy();
    let mut values = vec![[Rational::zero(), Rational::zero()]; net.edge_count()];
    let side = |e: EdgeId, from: NodeId| usize::from(net.edge(e).u != from);
    let (order, parent) = rooted(net, 0);
    for &v in order.iter().rev() {
        let mut acc = energy[v].clone();
        for &(e, c) in net.incident(v) {
            if parent[c] == Some((v, e)) {
                acc += &potential_step(&values[e][side(e, c)], &net.edge(e).length);
            }
        }
        if let Some((_, e)) = parent[v] {
            values[e][side(e, v)] = acc;
        }
    }
    for &v in &order {
        let mut total = energy[v].clone();
        for &(e, w) in net.incident(v) {
            total += &potential_step(&values[e][side(e, w)], &net.edge(e).length);
        }
        for &(e, c) in net.incident(v) {
            if parent[c] == Some((v, e)) {
                let own = potential_step(&values[e][side(e, c)], &net.edge(e).length);
                values[e][side(e, v)] = &total - &own;
            }
        }
    }
    EdgePotentialMap { values }
}

/// Potential of the component of `from` after removing `edge`, computed
/// directly by rooting that component at `from`.
pub fn edge_potential_direct(tree: &TreeInstance, edge: EdgeId, from: NodeId) -> Rational {
    let net = &tree.net;
    let energy = tree.node_energy();
    // depth-first over the component, skipping `edge`
    let mut order = Vec::new();
    let mut parent: Vec<Option<(NodeId, EdgeId)>> = vec![None; net.node_count()];
    let mut seen = vec![false; net.node_count()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &(e, v) in net.incident(u) {
            if e != edge && !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                stack.push(v);
            }
        }
    }
    let mut val = energy;
    for &v in order.iter().rev() {
        if let Some((p, e)) = parent[v] {
            let up = potential_step(&val[v], &net.edge(e).length);
            val[p] += &up;
        }
    }
    val[from].clone()
}

/// Meeting offsets on one edge, measured from `edge(e).u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergecastInterval {
    pub edge: EdgeId,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCut {
    pub edge: EdgeId,
    /// Cut value under the line case split; `None` when both sides are in
    /// deficit.
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergecastPoints {
    pub feasible: bool,
    pub intervals: Vec<ConvergecastInterval>,
    pub cuts: Vec<EdgeCut>,
    /// Set when the truncated tree is a single node: everyone meets there.
    pub node: Option<NodeId>,
}

/// Value of a cut between potentials `a` and `b` across length `d`.
pub fn cut_value(a: &Rational, b: &Rational, d: &Rational) -> Option<Rational> {
    match (a.is_nonneg(), b.is_nonneg()) {
        (true, true) => Some(a + b - d),
        (true, false) => Some(a + &b.half() - d),
        (false, true) => Some(&a.half() + b - d),
        (false, false) => None,
    }
}

/// Offsets from the `a` side at which both sides can meet.
fn meeting_offsets(a: &Rational, b: &Rational, d: &Rational) -> Option<(Rational, Rational)> {
    let zero = Rational::zero();
    let (lo, hi) = match (a.is_nonneg(), b.is_nonneg()) {
        (true, true) => {
            // each side gathers at its end; either carrier may also fetch the
            // other's stranded packet and come back
            let e = a + b - d;
            if e.is_negative() {
                return None;
            }
            ((d - b - &e).max(zero.clone()), (a + &e).min(d.clone()))
        }
        (true, false) => {
            // cross, top up the deficit at the far end, then walk back
            let spare = a - d + b;
            if spare.is_negative() {
                return None;
            }
            ((d - &spare).max(zero.clone()), d.clone())
        }
        (false, true) => {
            let spare = b - d + a;
            if spare.is_negative() {
                return None;
            }
            (zero.clone(), spare.min(d.clone()))
        }
        (false, false) => return None,
    };
    (lo <= hi).then_some((lo, hi))
}

/// Convergecast decision and meeting intervals. Intervals refer to edges of
/// `tree`; points on agentless branches pruned by truncation are not listed.
pub fn convergecast_points(tree: &TreeInstance) -> Result<ConvergecastPoints, SolveError> {
    let (t, remap) = truncate(tree)?;
    if t.net.node_count() == 1 {
        return Ok(ConvergecastPoints { feasible: true, intervals: vec![], cuts: vec![], node: Some(remap.node_old[0]) });
    }
    let pot = all_edge_potentials(&t);
    let mut intervals = Vec::new();
    let mut cuts = Vec::new();
    for (i, [a, b]) in pot.values.iter().enumerate() {
        let d = &t.net.edge(i).length;
        let old = remap.edge_old[i].expect("truncation only removes edges");
        cuts.push(EdgeCut { edge: old, value: cut_value(a, b, d) });
        if let Some((lo, hi)) = meeting_offsets(a, b, d) {
            intervals.push(ConvergecastInterval { edge: old, lo, hi });
        }
    }
    let feasible = cuts.iter().any(|c| c.value.as_ref().is_some_and(Rational::is_nonneg));
    Ok(ConvergecastPoints { feasible, intervals, cuts, node: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDelivery {
    pub feasible: bool,
    pub surplus_or_deficit: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

/// A tree with extra nodes inserted at edge points, and the way back.
struct Split {
    tree: TreeInstance,
    /// (edge split, offset on it, new node, new far edge) per split, in order.
    splits: Vec<(EdgeId, Rational, NodeId, EdgeId)>,
    original_edges: usize,
}

impl Split {
    fn new(tree: &TreeInstance) -> Self {
        Split { tree: tree.clone(), splits: vec![], original_edges: tree.net.edge_count() }
    }

    /// Node for an original point, splitting an edge when needed.
    fn node_at(&mut self, p: &Point) -> Result<NodeId, SolveError> {
        let (mut e, mut off) = match tree_loc(&self.tree.net, self.original_edges, p)? {
            Loc::Node(u) => return Ok(u),
            Loc::Edge(e, off) => (e, off),
        };
        // follow earlier splits of the same edge
        for (se, at, node, ne) in &self.splits {
            if *se != e {
                continue;
            }
            if off == *at {
                return Ok(*node);
            }
            if off > *at {
                off = &off - at;
                e = *ne;
            }
        }
        let label = fresh_label(&self.tree.net, &HashSet::new(), "split", self.splits.len());
        let node = self.tree.net.subdivide(e, off.clone(), label);
        let ne = self.tree.net.edge_count() - 1;
        self.splits.push((e, off, node, ne));
        Ok(node)
    }

    /// Maps a point of the split tree back to the original tree.
    fn unsplit(&self, original: &Network, p: &Point) -> Point {
        let mut loc = match self.tree.net.loc(p) {
            Ok(l) => l,
            Err(_) => return p.clone(),
        };
        for (e, at, node, ne) in self.splits.iter().rev() {
            loc = match loc {
                Loc::Node(u) if u == *node => Loc::Edge(*e, at.clone()),
                Loc::Edge(x, off) if x == *ne => Loc::Edge(*e, at + &off),
                other => other,
            };
        }
        original.point(&loc)
    }
}

/// Resolves a point given in the original tree's terms.
fn tree_loc(net: &Network, original_edges: usize, p: &Point) -> Result<Loc, SolveError> {
    if let Point::Edge { edge, .. } = p {
        if *edge >= original_edges {
            return Err(ModelError::BadPoint(format!("edge {edge}")).into());
        }
    }
    Ok(net.loc(p)?)
}

/// Energy a subtree can send to its root: local energy plus whatever each
/// child subtree has left after crossing its edge.
fn deliverable(net: &Network, energy: &[Rational], order: &[NodeId], parent: &[Option<(NodeId, EdgeId)>], blocked: &[bool]) -> Vec<Rational> {
    let mut val: Vec<Rational> = energy.to_vec();
    for &v in order.iter().rev() {
        if blocked[v] {
            continue;
        }
        if let Some((p, e)) = parent[v] {
            let up = (&val[v] - &net.edge(e).length).max(Rational::zero());
            val[p] += &up;
        }
    }
    val
}

/// Delivery between two points of a tree via the path between them.
pub fn tree_delivery(tree: &TreeInstance, s: &Point, t: &Point) -> Result<TreeDelivery, SolveError> {
    let mut split = Split::new(tree);
    let sn = split.node_at(s)?;
    let tn = split.node_at(t)?;
    let work = &split.tree;
    let net = &work.net;
    let (order, parent) = rooted(net, tn);
    // the s-t path, from s to t
    let mut path = vec![sn];
    while let Some((p, _)) = parent[*path.last().expect("non-empty")] {
        path.push(p);
    }
    let on_path: Vec<bool> = {
        let mut v = vec![false; net.node_count()];
        for &u in &path {
            v[u] = true;
        }
        v
    };
    // off-path subtrees hang below path nodes in the rooting at t
    let energy = work.node_energy();
    let val = deliverable(net, &energy, &order, &parent, &on_path);
    let mut positions = Vec::with_capacity(path.len());
    let mut x = Rational::zero();
    for (k, &u) in path.iter().enumerate() {
        if k > 0 {
            let (_, e) = parent[path[k - 1]].expect("path edge");
            x += &net.edge(e).length;
        }
        positions.push((x.clone(), val[u].clone()));
    }
    let (line, merge) = LineInstance::from_agents(&positions)?;
    let end = positions.last().expect("non-empty").0.clone();
    let (value, line_schedule) = match delivery_plan(&line, &Rational::zero(), &end) {
        Ok(v) => v,
        Err(SolveError::Infeasible) => {
            let d = crate::line::delivery_decide(&line, &Rational::zero(), &end);
            return Ok(TreeDelivery { feasible: false, surplus_or_deficit: d.surplus_or_deficit, schedule: None });
        }
        Err(e) => return Err(e),
    };

    // gathering: pool each node, then send profitable subtrees up
    let mut sch = Schedule::new();
    let mut holder: Vec<Option<AgentId>> = vec![None; net.node_count()];
    for (i, a) in work.agents.iter().enumerate() {
        match holder[a.node] {
            None => holder[a.node] = Some(i),
            Some(h) => sch.give(i, h, a.energy.clone()),
        }
    }
    for &v in order.iter().rev() {
        if on_path[v] {
            continue;
        }
        let (p, e) = parent[v].expect("off-path nodes have parents");
        let d = &net.edge(e).length;
        if &val[v] <= d {
            continue;
        }
        let Some(h) = holder[v] else { continue };
        sch.walk(h, net.point(&Loc::Node(v)), net.point(&Loc::Node(p)));
        match holder[p] {
            None => holder[p] = Some(h),
            Some(q) => sch.give(h, q, &val[v] - d),
        }
    }
    // line agents are path nodes (merged when co-located)
    let line_agent = |i: AgentId| -> Option<AgentId> {
        merge.groups()[i].iter().find_map(|&k| holder[path[k]])
    };
    let mut pooled = Schedule::new();
    for g in merge.groups() {
        let lead = g.iter().find_map(|&k| holder[path[k]]);
        for &k in g {
            if let (Some(l), Some(h)) = (lead, holder[path[k]]) {
                pooled.give(h, l, val[path[k]].clone());
            }
        }
    }
    let to_tree = |p: &Point| -> Point {
        let x = p.coord().expect("line schedules use coordinates");
        point_on_path(net, &path, &parent, &positions, x)
    };
    let body = line_schedule.map(line_agent, to_tree)?;
    let mut full = sch;
    full.extend(pooled);
    for step in body.steps {
        match step {
            Step::Move { agent, path: pts } => {
                // expand straight line moves through intermediate path nodes
                let mut expanded: Vec<Point> = Vec::new();
                for w in pts.windows(2) {
                    let seg = path_between(net, &path, &parent, &positions, &w[0], &w[1]);
                    for q in seg {
                        if expanded.last() != Some(&q) {
                            expanded.push(q);
                        }
                    }
                }
                if expanded.len() > 1 {
                    full.steps.push(Step::Move { agent, path: expanded });
                }
            }
            other => full.steps.push(other),
        }
    }
    let lifted = Schedule {
        steps: full
            .steps
            .into_iter()
            .map(|st| match st {
                Step::Move { agent, path } => {
                    Step::Move { agent, path: path.iter().map(|p| split.unsplit(&tree.net, p)).collect() }
                }
                other => other,
            })
            .collect(),
    };
    Ok(TreeDelivery { feasible: true, surplus_or_deficit: value, schedule: Some(lifted) })
}

/// Tree point at distance `x` from `s` along the path.
fn point_on_path(
    net: &Network,
    path: &[NodeId],
    parent: &[Option<(NodeId, EdgeId)>],
    positions: &[(Rational, Rational)],
    x: &Rational,
) -> Point {
    let k = positions.partition_point(|(p, _)| p <= x);
    let k = k.max(1);
    if &positions[k - 1].0 == x || k == positions.len() {
        return net.point(&Loc::Node(path[k - 1]));
    }
    let (_, e) = parent[path[k - 1]].expect("path edge");
    let along = x - &positions[k - 1].0;
    let off = if net.edge(e).u == path[k - 1] { along } else { &net.edge(e).length - &along };
    net.point(&net.normalize(e, off))
}

/// The points a straight walk between two path points passes through.
fn path_between(
    net: &Network,
    path: &[NodeId],
    parent: &[Option<(NodeId, EdgeId)>],
    positions: &[(Rational, Rational)],
    a: &Point,
    b: &Point,
) -> Vec<Point> {
    let coord = |p: &Point| -> Rational {
        match net.loc(p).expect("own point") {
            Loc::Node(u) => positions[path.iter().position(|&w| w == u).expect("on path")].0.clone(),
            Loc::Edge(e, off) => {
                let k = path.iter().position(|&w| parent[w].is_some_and(|(_, pe)| pe == e)).expect("path edge");
                let along = if net.edge(e).u == path[k] { off } else { &net.edge(e).length - &off };
                &positions[k].0 + &along
            }
        }
    };
    let (xa, xb) = (coord(a), coord(b));
    let mut out = vec![a.clone()];
    let inner: Vec<usize> = if xa <= xb {
        (0..path.len()).filter(|&k| positions[k].0 > xa && positions[k].0 < xb).collect()
    } else {
        (0..path.len()).rev().filter(|&k| positions[k].0 < xa && positions[k].0 > xb).collect()
    };
    for k in inner {
        out.push(net.point(&Loc::Node(path[k])));
    }
    out.push(b.clone());
    out
}

/// Largest number of agents the broadcast tables accept.
pub const BROADCAST_AGENT_LIMIT: usize = 64;

/// Table of one side of an edge, rooted at `from`: the subtree left after
/// removing `edge`.
///
/// With `i >= 1` informed carriers arriving at `from` and `j` agents leaving
/// it at the end, [`BroadcastTable::entry`] is the largest net energy that
/// can be taken out at `from` once every agent of the subtree is informed.
/// Negative entries are energy that must be brought in. With `i = 0` the only
/// option is evacuation: every agent of the subtree walks out through `from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BroadcastTable {
    pub edge: EdgeId,
    pub from: NodeId,
    pub agents: usize,
    pub evacuation: Option<Rational>,
    /// Indexed by `i - j + limit`.
    balance: Vec<Option<Rational>>,
    limit: usize,
}

impl BroadcastTable {
    pub fn entry(&self, i: usize, j: usize) -> Option<Rational> {
        if i == 0 {
            return if j == self.agents { self.evacuation.clone() } else { None };
        }
        if j > i + self.agents {
            return None;
        }
        let v = self.by_balance(i as i64 - j as i64)?;
        // energy left inside cannot be taken out without a returning agent
        Some(if j == 0 { v.min(Rational::zero()) } else { v })
    }

    fn by_balance(&self, delta: i64) -> Option<Rational> {
        let k = delta + self.limit as i64;
        if k < 0 {
            return None;
        }
        self.balance.get((k as usize).min(2 * self.limit)).cloned().flatten()
    }

    /// `(n + 1) x (n + 1)` matrix of entries.
    pub fn matrix(&self, n: usize) -> Vec<Vec<Option<Rational>>> {
        (0..=n).map(|i| (0..=n).map(|j| self.entry(i, j)).collect()).collect()
    }
}

fn better(slot: &mut Option<Rational>, v: Rational) {
    if slot.as_ref().is_none_or(|old| &v > old) {
        *slot = Some(v);
    }
}

/// Best net energy per body balance `x - y` sent across an edge into a
/// subtree with table `t`.
fn across(t: &BroadcastTable, d: &Rational, limit: usize) -> Vec<Option<Rational>> {
    let l = limit as i64;
    let mut out = vec![None; 2 * limit + 1];
    if let Some(ev) = &t.evacuation {
        let cost = d * &Rational::from_int(t.agents as i64);
        if ev >= &cost && t.agents <= limit {
            better(&mut out[limit - t.agents], ev - &cost);
        }
    }
    for b in -(t.agents as i64)..=l {
        let Some(v) = t.by_balance(b) else { continue };
        let slot = &mut out[(b + l) as usize];
        if b >= 1 {
            // b carriers and nobody back, or one more round trip to fetch the surplus
            better(slot, v.clone().min(Rational::zero()) - d * &Rational::from_int(b));
            better(slot, v - d * &Rational::from_int(b + 2));
        } else {
            // one carrier, 1 - b back
            better(slot, v - d * &Rational::from_int(2 - b));
        }
    }
    out
}

fn convolve(a: &[Option<Rational>], b: &[Option<Rational>], limit: usize) -> Vec<Option<Rational>> {
    let l = limit as i64;
    let mut out = vec![None; 2 * limit + 1];
    for (i, x) in a.iter().enumerate() {
        let Some(x) = x else { continue };
        for (j, y) in b.iter().enumerate() {
            let Some(y) = y else { continue };
            let k = (i as i64 - l) + (j as i64 - l);
            if k.abs() <= l {
                better(&mut out[(k + l) as usize], x + y);
            }
        }
    }
    out
}

/// Hub combination at `u` over the given incident sides.
struct Hub {
    /// Best total over children per balance.
    children: Vec<Option<Rational>>,
    evacuation: Option<Rational>,
    agents: usize,
}

fn hub(
    net: &Network,
    energy: &[Rational],
    count: &[usize],
    u: NodeId,
    sides: &[(EdgeId, &BroadcastTable)],
    limit: usize,
) -> Hub {
    let mut children = vec![None; 2 * limit + 1];
    children[limit] = Some(Rational::zero());
    let mut evacuation = Some(energy[u].clone());
    let mut agents = count[u];
    for &(e, t) in sides {
        let d = &net.edge(e).length;
        children = convolve(&children, &across(t, d, limit), limit);
        let cost = d * &Rational::from_int(t.agents as i64);
        evacuation = match (evacuation, &t.evacuation) {
            (Some(acc), Some(ev)) if ev >= &cost => Some(acc + ev - cost),
            _ => None,
        };
        agents += t.agents;
    }
    Hub { children, evacuation, agents }
}

fn side_table(energy: &[Rational], count: &[usize], u: NodeId, e: EdgeId, h: Hub, limit: usize) -> BroadcastTable {
    // F(delta) = e_u + max over child balances b <= delta + a_u
    let l = limit as i64;
    let mut prefix: Vec<Option<Rational>> = Vec::with_capacity(2 * limit + 1);
    let mut run: Option<Rational> = None;
    for v in &h.children {
        if let Some(v) = v {
            better(&mut run, v.clone());
        }
        prefix.push(run.clone());
    }
    let balance = (0..=2 * limit)
        .map(|k| {
            let cap = (k as i64 - l) + count[u] as i64;
            if cap < -l {
                return None;
            }
            let idx = ((cap + l) as usize).min(2 * limit);
            prefix[idx].as_ref().map(|v| v + &energy[u])
        })
        .collect();
    BroadcastTable { edge: e, from: u, agents: h.agents, evacuation: h.evacuation, balance, limit }
}

/// Tables for both sides of every edge of a truncated, ternarized tree.
/// `tables[e][0]` is rooted at `edge(e).u`, `tables[e][1]` at `edge(e).v`.
pub fn broadcast_tables_raw(tree: &TreeInstance) -> Result<Vec<[BroadcastTable; 2]>, SolveError> {
    let n = tree.agents.len();
    if n > BROADCAST_AGENT_LIMIT {
        return Err(SolveError::TooLarge(format!("{n} agents exceed the broadcast table limit of {BROADCAST_AGENT_LIMIT}")));
    }
    let limit = n.max(1);
    let net = &tree.net;
    let energy = tree.node_energy();
    let count = tree.node_agent_count();
    let side = |e: EdgeId, from: NodeId| usize::from(net.edge(e).u != from);
    let mut slots: Vec<[Option<BroadcastTable>; 2]> = vec![[None, None]; net.edge_count()];
    let (order, parent) = rooted(net, 0);
    for &v in order.iter().rev() {
        let Some((_, pe)) = parent[v] else { continue };
        let sides: Vec<(EdgeId, &BroadcastTable)> = net
            .incident(v)
            .iter()
            .filter(|&&(e, _)| e != pe)
            .map(|&(e, c)| (e, slots[e][side(e, c)].as_ref().expect("children first")))
            .collect();
        let t = side_table(&energy, &count, v, pe, hub(net, &energy, &count, v, &sides, limit), limit);
        slots[pe][side(pe, v)] = Some(t);
    }
    for &v in &order {
        let inc = net.incident(v);
        for &(e, c) in inc {
            if parent[c] != Some((v, e)) {
                continue;
            }
            let sides: Vec<(EdgeId, &BroadcastTable)> = inc
                .iter()
                .filter(|&&(f, _)| f != e)
                .map(|&(f, w)| (f, slots[f][side(f, w)].as_ref().expect("parent side first")))
                .collect();
            let t = side_table(&energy, &count, v, e, hub(net, &energy, &count, v, &sides, limit), limit);
            slots[e][side(e, v)] = Some(t);
        }
    }
    Ok(slots.into_iter().map(|[a, b]| [a.expect("filled"), b.expect("filled")]).collect())
}

/// Tables computed on the truncated, ternarized form of `tree`.
#[derive(Debug, Clone)]
pub struct BroadcastTables {
    pub tree: TreeInstance,
    pub remap: TreeRemap,
    pub tables: Vec<[BroadcastTable; 2]>,
}

pub fn broadcast_tables(tree: &TreeInstance) -> Result<BroadcastTables, SolveError> {
    let (t, r1) = truncate(tree)?;
    let (t, r2) = ternarize(&t);
    let tables = broadcast_tables_raw(&t)?;
    Ok(BroadcastTables { tree: t, remap: r1.then(&r2), tables })
}

impl BroadcastTables {
    /// Whether the agents at derived node `r` can inform everyone.
    pub fn is_source(&self, r: NodeId) -> bool {
        let net = &self.tree.net;
        let count = self.tree.node_agent_count();
        if count[r] == 0 {
            return false;
        }
        let energy = self.tree.node_energy();
        let limit = self.tree.agents.len().max(1);
        let sides: Vec<(EdgeId, &BroadcastTable)> = net
            .incident(r)
            .iter()
            .map(|&(e, w)| (e, &self.tables[e][usize::from(net.edge(e).u != w)]))
            .collect();
        let h = hub(net, &energy, &count, r, &sides, limit);
        // informed bodies at r may send up to count[r] more carriers than return
        h.children[..=limit + count[r].min(limit)]
            .iter()
            .flatten()
            .any(|v| (v + &energy[r]).is_nonneg())
    }
}

/// Nodes of `tree` whose agents can broadcast to every agent.
pub fn broadcast_sources(tree: &TreeInstance) -> Result<BTreeSet<NodeId>, SolveError> {
    let tables = broadcast_tables(tree)?;
    Ok((0..tables.tree.net.node_count())
        .filter(|&r| tables.is_source(r))
        .map(|r| tables.remap.node_old[r])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn build(nodes: &[&str], edges: &[(usize, usize, i64)], agents: &[(usize, i64)]) -> TreeInstance {
        let mut net = Network::new();
        for l in nodes {
            net.add_node(*l);
        }
        for &(u, v, d) in edges {
            net.add_edge(u, v, q!(d), false);
        }
        let agents = agents.iter().map(|&(node, e)| Agent { node, energy: q!(e) }).collect();
        TreeInstance::new(net, agents).unwrap()
    }

    fn star() -> TreeInstance {
        build(&["c", "x", "y", "z"], &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], &[(1, 2), (2, 2), (3, 2)])
    }

    #[test]
    fn truncation() {
        let t = build(&["a", "b", "c"], &[(0, 1, 1), (1, 2, 1)], &[(0, 1), (1, 1)]);
        let (tt, remap) = truncate(&t).unwrap();
        assert_eq!(tt.net.node_count(), 2);
        assert_eq!(tt.net.edge_count(), 1);
        assert_eq!(remap.node_old, vec![0, 1]);
        let (same, _) = truncate(&star()).unwrap();
        assert_eq!(same, star());
        let lonely = build(&["c", "x", "y", "z"], &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], &[(0, 5)]);
        assert_eq!(truncate(&lonely).unwrap().0.net.node_count(), 1);
        let empty = build(&["a"], &[], &[]);
        assert!(truncate(&empty).is_err());
    }

    #[test]
    fn ternarization() {
        let t = build(&["v", "a", "b", "c", "d"], &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 4, 4)], &[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let (tt, remap) = ternarize(&t);
        assert_eq!(tt.net.node_count(), 6);
        assert!((0..6).all(|u| tt.net.degree(u) <= 3));
        assert_eq!(remap.node_old[5], 0);
        let zero: Vec<_> = tt.net.edges().iter().filter(|e| e.length.is_zero()).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(tt.net.degree(0), 3);
        assert_eq!(tt.net.degree(5), 3);
        assert_eq!(ternarize(&star()).0, star());
    }

    #[test]
    fn star_potentials() {
        let t = star();
        let pot = all_edge_potentials(&t);
        for e in 0..3 {
            assert_eq!(pot.from_side(&t.net, e, e + 1), &q!(2));
            assert_eq!(pot.from_side(&t.net, e, 0), &q!(2));
            assert_eq!(edge_potential_direct(&t, e, 0), q!(2));
        }
        let c = convergecast_points(&t).unwrap();
        assert!(c.feasible);
        assert_eq!(c.cuts[0].value, Some(q!(3)));
        assert_eq!(c.intervals[0], ConvergecastInterval { edge: 0, lo: q!(0), hi: q!(1) });
    }

    #[test]
    fn path_matches_line() {
        let line = LineInstance::from_ints(&[0, 10, 20, 30, 40], &[0, 24, 10, 40, 0]).unwrap();
        let t = line.to_path_tree();
        let pot = all_edge_potentials(&t);
        let fwd = crate::line::forward_potentials(&line);
        for i in 0..4 {
            assert_eq!(pot.from_side(&t.net, i, i), &fwd[i]);
        }
        let stuck = LineInstance::from_ints(&[0, 10], &[4, 4]).unwrap().to_path_tree();
        let c = convergecast_points(&stuck).unwrap();
        assert!(!c.feasible);
        assert!(c.intervals.is_empty());
        let single = build(&["a"], &[], &[(0, 0)]);
        assert_eq!(convergecast_points(&single).unwrap().node, Some(0));
    }

    #[test]
    fn branch_energy() {
        // s - t path with a branch at s
        let rich = build(&["s", "t", "b"], &[(0, 1, 4), (0, 2, 3)], &[(0, 4), (2, 5)]);
        let d = tree_delivery(&rich, &Point::node("s"), &Point::node("t")).unwrap();
        assert!(d.feasible);
        assert_eq!(d.surplus_or_deficit, q!(2));
        let poor = build(&["s", "t", "b"], &[(0, 1, 4), (0, 2, 3)], &[(0, 4), (2, 2)]);
        let d = tree_delivery(&poor, &Point::node("s"), &Point::node("t")).unwrap();
        assert_eq!(d.surplus_or_deficit, q!(0));
        let short = build(&["s", "t", "b"], &[(0, 1, 5), (0, 2, 3)], &[(0, 4), (2, 2)]);
        let d = tree_delivery(&short, &Point::node("s"), &Point::node("t")).unwrap();
        assert!(!d.feasible);
    }

    #[test]
    fn broadcast_small() {
        let single = build(&["a"], &[], &[(0, 3)]);
        assert_eq!(broadcast_sources(&single).unwrap(), BTreeSet::from([0]));
        let pair = LineInstance::from_ints(&[0, 10], &[10, 10]).unwrap().to_path_tree();
        assert_eq!(broadcast_sources(&pair).unwrap(), BTreeSet::from([0, 1]));
        let weak = LineInstance::from_ints(&[0, 10], &[4, 4]).unwrap().to_path_tree();
        assert!(broadcast_sources(&weak).unwrap().is_empty());
        // a leaf on its own: everything it holds, whatever arrives
        let leaf = build(&["a", "b"], &[(0, 1, 2)], &[(0, 1), (1, 7)]);
        let tables = broadcast_tables(&leaf).unwrap();
        let t = &tables.tables[0][1];
        // nobody comes back, so there is no surplus to report
        assert_eq!(t.entry(1, 0), Some(q!(0)));
        assert_eq!(t.entry(1, 2), Some(q!(7)));
        assert_eq!(t.entry(1, 3), None);
        assert_eq!(t.entry(0, 1), Some(q!(7)));
        assert_eq!(t.entry(0, 0), None);
    }
}
