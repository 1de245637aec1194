//! Instances, tasks, schedules and the document formats that carry them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SolveError};
use crate::rational::Rational;

pub type AgentId = usize;
pub type NodeId = usize;
pub type EdgeId = usize;

/// A location in an instance: a line coordinate, a node, or a point inside an
/// edge at `offset` from the edge's first endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Coord(Rational),
    Node { node: String },
    Edge { edge: EdgeId, offset: Rational },
}

impl Point {
    pub fn node(label: impl Into<String>) -> Self {
        Point::Node { node: label.into() }
    }

    pub fn coord(&self) -> Option<&Rational> {
        match self {
            Point::Coord(x) => Some(x),
            _ => None,
        }
    }
}

impl From<Rational> for Point {
    fn from(x: Rational) -> Self {
        Point::Coord(x)
    }
}

/// What the agents are asked to achieve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Task {
    Delivery { source: Point, target: Point },
    Convergecast,
    Broadcast {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<AgentId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Move { agent: AgentId, path: Vec<Point> },
    Transfer { from: AgentId, to: AgentId, amount: Rational },
}

/// A sequential list of moves and energy transfers. Information exchange is
/// implicit whenever agents meet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a move unless it has zero length.
    pub fn walk(&mut self, agent: AgentId, from: Point, to: Point) {
        if from != to {
            self.steps.push(Step::Move { agent, path: vec![from, to] });
        }
    }

    /// Appends a transfer unless the amount is zero or donor equals receiver.
    pub fn give(&mut self, from: AgentId, to: AgentId, amount: Rational) {
        if from != to && !amount.is_zero() {
            self.steps.push(Step::Transfer { from, to, amount });
        }
    }

    pub fn extend(&mut self, other: Schedule) {
        self.steps.extend(other.steps);
    }

    /// Rewrites agent ids and points.
    pub fn map(
        &self,
        mut agent: impl FnMut(AgentId) -> Option<AgentId>,
        mut point: impl FnMut(&Point) -> Point,
    ) -> Result<Schedule, SolveError> {
        let mut out = Schedule::new();
        for step in &self.steps {
            match step {
                Step::Move { agent: a, path } => {
                    let mapped: Vec<Point> = path.iter().map(&mut point).collect();
                    match agent(*a) {
                        Some(b) => out.steps.push(Step::Move { agent: b, path: mapped }),
                        None if mapped.windows(2).all(|w| w[0] == w[1]) => {}
                        None => {
                            return Err(SolveError::Internal(format!(
                                "virtual agent {a} was scheduled to move"
                            )))
                        }
                    }
                }
                Step::Transfer { from, to, amount } => match (agent(*from), agent(*to)) {
                    (Some(f), Some(t)) => out.give(f, t, amount.clone()),
                    _ if amount.is_zero() => {}
                    _ => {
                        return Err(SolveError::Internal(format!(
                            "transfer {from}->{to} involves a virtual agent"
                        )))
                    }
                },
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Line

/// Agents on a line, sorted by strictly increasing position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineInstance {
    positions: Vec<Rational>,
    energies: Vec<Rational>,
}

impl LineInstance {
    pub fn new(positions: Vec<Rational>, energies: Vec<Rational>) -> Result<Self, ModelError> {
        if positions.len() != energies.len() {
            return Err(ModelError::Malformed(format!(
                "{} positions but {} energies",
                positions.len(),
                energies.len()
            )));
        }
        if positions.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if let Some(i) = energies.iter().position(Rational::is_negative) {
            return Err(ModelError::NegativeEnergy(i));
        }
        if let Some(i) = positions.windows(2).position(|w| w[0] >= w[1]) {
            return Err(ModelError::NotIncreasing(i + 1));
        }
        Ok(Self { positions, energies })
    }

    pub fn from_ints(positions: &[i64], energies: &[i64]) -> Result<Self, ModelError> {
        Self::new(
            positions.iter().map(|&x| Rational::from_int(x)).collect(),
            energies.iter().map(|&x| Rational::from_int(x)).collect(),
        )
    }

    /// Builds an instance from unsorted agents, merging co-located agents
    /// into one agent holding their summed energy.
    pub fn from_agents(agents: &[(Rational, Rational)]) -> Result<(Self, AgentMerge), ModelError> {
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if let Some(i) = agents.iter().position(|(_, e)| e.is_negative()) {
            return Err(ModelError::NegativeEnergy(i));
        }
        let mut groups: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
        for (i, (x, _)) in agents.iter().enumerate() {
            groups.entry(x.clone()).or_default().push(i);
        }
        let mut positions = Vec::with_capacity(groups.len());
        let mut energies = Vec::with_capacity(groups.len());
        let mut merged = Vec::with_capacity(groups.len());
        for (x, members) in groups {
            positions.push(x);
            energies.push(members.iter().map(|&i| &agents[i].1).sum());
            merged.push(members);
        }
        let inst = Self::new(positions, energies)?;
        Ok((inst, AgentMerge { groups: merged, positions: agents.iter().map(|a| a.0.clone()).collect() }))
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Rational] {
        &self.positions
    }

    pub fn energies(&self) -> &[Rational] {
        &self.energies
    }

    pub fn position(&self, i: AgentId) -> &Rational {
        &self.positions[i]
    }

    pub fn energy(&self, i: AgentId) -> &Rational {
        &self.energies[i]
    }

    pub fn total_energy(&self) -> Rational {
        self.energies.iter().sum()
    }

    /// Reflects the line through the origin; agent `i` becomes `n - 1 - i`.
    pub fn mirror(&self) -> Self {
        Self {
            positions: self.positions.iter().rev().map(|x| -x).collect(),
            energies: self.energies.iter().rev().cloned().collect(),
        }
    }

    pub fn translate(&self, c: &Rational) -> Self {
        Self { positions: self.positions.iter().map(|x| x + c).collect(), energies: self.energies.clone() }
    }

    /// Multiplies positions and energies by `c > 0`.
    pub fn scale(&self, c: &Rational) -> Self {
        assert!(c > &Rational::zero());
        Self {
            positions: self.positions.iter().map(|x| x * c).collect(),
            energies: self.energies.iter().map(|x| x * c).collect(),
        }
    }

    pub fn with_energy(&self, i: AgentId, e: Rational) -> Result<Self, ModelError> {
        let mut energies = self.energies.clone();
        energies[i] = e;
        Self::new(self.positions.clone(), energies)
    }

    /// Agents `range` as a standalone instance.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self { positions: self.positions[range.clone()].to_vec(), energies: self.energies[range].to_vec() }
    }

    pub fn index_of(&self, x: &Rational) -> Option<AgentId> {
        self.positions.binary_search(x).ok()
    }

    /// The same agents as a path tree with one node per agent.
    pub fn to_path_tree(&self) -> TreeInstance {
        let mut net = Network::new();
        for i in 0..self.n() {
            net.add_node(format!("p{i}"));
        }
        for i in 1..self.n() {
            net.add_edge(i - 1, i, &self.positions[i] - &self.positions[i - 1], false);
        }
        let agents = (0..self.n()).map(|i| Agent { node: i, energy: self.energies[i].clone() }).collect();
        TreeInstance::new(net, agents).expect("a path is a tree")
    }
}

/// Correspondence between document agents and the merged agents of a
/// [`LineInstance`] built by [`LineInstance::from_agents`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentMerge {
    groups: Vec<Vec<usize>>,
    positions: Vec<Rational>,
}

impl AgentMerge {
    pub fn identity(n: usize, positions: &[Rational]) -> Self {
        Self { groups: (0..n).map(|i| vec![i]).collect(), positions: positions.to_vec() }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn merged_of(&self, original: usize) -> Option<AgentId> {
        self.groups.iter().position(|g| g.contains(&original))
    }

    pub fn original_count(&self) -> usize {
        self.positions.len()
    }

    /// Positions of the original agents, in their original order.
    pub fn original_positions(&self) -> &[Rational] {
        &self.positions
    }

    /// Renames merged agents to their group leaders.
    pub fn lift(&self, schedule: &Schedule) -> Result<Schedule, SolveError> {
        schedule.map(|a| self.groups.get(a).map(|g| g[0]), Clone::clone)
    }

    /// Like [`AgentMerge::lift`], but co-located agents first hand their
    /// energy (`energies`, in document order) to the group leader.
    pub fn lift_with_energies(&self, schedule: &Schedule, energies: &[Rational]) -> Result<Schedule, SolveError> {
        let mut out = Schedule::new();
        for g in &self.groups {
            for &member in &g[1..] {
                out.give(member, g[0], energies[member].clone());
            }
        }
        out.extend(self.lift(schedule)?);
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Networks

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub length: Rational,
    pub directed: bool,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A weighted graph; edges may individually be directed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Network {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(EdgeId, NodeId)>>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> NodeId {
        let label = label.into();
        if let Some(&id) = self.index.get(&label) {
            return id;
        }
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        self.adj.push(Vec::new());
        id
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, length: Rational, directed: bool) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge { u, v, length, directed });
        self.adj[u].push((id, v));
        if u != v {
            self.adj[v].push((id, u));
        }
        id
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Result<NodeId, ModelError> {
        self.index.get(label).copied().ok_or_else(|| ModelError::UnknownNode(label.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Incident edges of `u` with the opposite endpoint, ignoring direction.
    pub fn incident(&self, u: NodeId) -> &[(EdgeId, NodeId)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn is_directed(&self) -> bool {
        self.edges.iter().any(|e| e.directed)
    }

    fn check_lengths(&self) -> Result<(), ModelError> {
        match self.edges.iter().position(|e| e.length.is_negative()) {
            Some(i) => Err(ModelError::NegativeLength(i)),
            None => Ok(()),
        }
    }

    fn check_tree(&self) -> Result<(), ModelError> {
        let n = self.node_count();
        if n == 0 {
            return Err(ModelError::NotATree("no nodes".into()));
        }
        if self.is_directed() {
            return Err(ModelError::NotATree("directed edge".into()));
        }
        if self.edges.len() != n - 1 {
            return Err(ModelError::NotATree(format!("{} nodes but {} edges", n, self.edges.len())));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(_, v) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count != n {
            return Err(ModelError::NotATree("disconnected (or contains a cycle)".into()));
        }
        Ok(())
    }

    /// Resolves a document point.
    pub fn loc(&self, p: &Point) -> Result<Loc, ModelError> {
        match p {
            Point::Node { node } => Ok(Loc::Node(self.node_id(node)?)),
            Point::Edge { edge, offset } => {
                let e = self.edges.get(*edge).ok_or_else(|| ModelError::BadPoint(format!("edge {edge}")))?;
                if offset.is_negative() || offset > &e.length {
                    return Err(ModelError::BadPoint(format!("offset {offset} outside edge {edge}")));
                }
                Ok(self.normalize(*edge, offset.clone()))
            }
            Point::Coord(_) => Err(ModelError::BadPoint("coordinates only apply to line instances".into())),
        }
    }

    /// Canonical location for `offset` along `edge`.
    pub fn normalize(&self, edge: EdgeId, offset: Rational) -> Loc {
        let e = &self.edges[edge];
        if offset.is_zero() {
            Loc::Node(e.u)
        } else if offset == e.length {
            Loc::Node(e.v)
        } else {
            Loc::Edge(edge, offset)
        }
    }

    pub fn point(&self, loc: &Loc) -> Point {
        match loc {
            Loc::Node(u) => Point::node(self.labels[*u].clone()),
            Loc::Edge(e, off) => Point::Edge { edge: *e, offset: off.clone() },
        }
    }

    /// Splits `edge` at `offset`, returning the new node. Used to turn edge
    /// points into nodes.
    pub fn subdivide(&mut self, edge: EdgeId, offset: Rational, label: String) -> NodeId {
        let Edge { v, length, directed, .. } = self.edges[edge].clone();
        let w = self.add_node(label);
        self.edges[edge].v = w;
        self.edges[edge].length = offset.clone();
        if let Some(slot) = self.adj[v].iter().position(|&(e, _)| e == edge) {
            self.adj[v].remove(slot);
        }
        let u = self.edges[edge].u;
        if let Some(slot) = self.adj[u].iter_mut().find(|(e, _)| *e == edge) {
            slot.1 = w;
        }
        self.adj[w].push((edge, u));
        self.add_edge(w, v, &length - &offset, directed);
        w
    }
}

/// A resolved location in a [`Network`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loc {
    Node(NodeId),
    /// Strictly inside the edge: `0 < offset < length`.
    Edge(EdgeId, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub node: NodeId,
    pub energy: Rational,
}

fn check_agents(net: &Network, agents: &[Agent]) -> Result<(), ModelError> {
    for (i, a) in agents.iter().enumerate() {
        if a.energy.is_negative() {
            return Err(ModelError::NegativeEnergy(i));
        }
        if a.node >= net.node_count() {
            return Err(ModelError::UnknownNode(format!("#{}", a.node)));
        }
    }
    Ok(())
}

/// Agents at the nodes of an undirected weighted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    pub net: Network,
    pub agents: Vec<Agent>,
}

impl TreeInstance {
    pub fn new(net: Network, agents: Vec<Agent>) -> Result<Self, ModelError> {
        net.check_lengths()?;
        net.check_tree()?;
        check_agents(&net, &agents)?;
        Ok(Self { net, agents })
    }

    pub fn node_energy(&self) -> Vec<Rational> {
        let mut e = vec![Rational::zero(); self.net.node_count()];
        for a in &self.agents {
            e[a.node] += &a.energy;
        }
        e
    }

    pub fn node_agent_count(&self) -> Vec<usize> {
        let mut c = vec![0; self.net.node_count()];
        for a in &self.agents {
            c[a.node] += 1;
        }
        c
    }

    pub fn as_graph(&self) -> GraphInstance {
        GraphInstance { net: self.net.clone(), agents: self.agents.clone() }
    }
}

/// Agents on a general graph or digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    pub net: Network,
    pub agents: Vec<Agent>,
}

impl GraphInstance {
    pub fn new(net: Network, agents: Vec<Agent>) -> Result<Self, ModelError> {
        net.check_lengths()?;
        check_agents(&net, &agents)?;
        Ok(Self { net, agents })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Line(LineInstance),
    Tree(TreeInstance),
    Graph(GraphInstance),
}

// ---------------------------------------------------------------------------
// Documents

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
}

impl Label {
    fn text(&self) -> String {
        match self {
            Label::Text(s) => s.clone(),
            Label::Int(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawEdge {
    u: Label,
    v: Label,
    length: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directed: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<Rational>,
    energy: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    nodes: Vec<Label>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edges: Vec<RawEdge>,
    agents: Vec<RawAgent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    task: Option<Task>,
}

/// A parsed instance document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDoc {
    pub instance: Instance,
    pub task: Option<Task>,
    /// For line documents: how document agents map onto merged agents.
    pub line_merge: Option<AgentMerge>,
    /// Document-order agent energies (line documents).
    pub line_energies: Vec<Rational>,
}

fn build_network(doc: &RawDoc, directed_default: bool) -> Result<Network, ModelError> {
    let mut net = Network::new();
    for l in &doc.nodes {
        net.add_node(l.text());
    }
    if net.node_count() != doc.nodes.len() {
        return Err(ModelError::Malformed("duplicate node label".into()));
    }
    for (i, e) in doc.edges.iter().enumerate() {
        let u = net.node_id(&e.u.text())?;
        let v = net.node_id(&e.v.text())?;
        if e.length.is_negative() {
            return Err(ModelError::NegativeLength(i));
        }
        net.add_edge(u, v, e.length.clone(), e.directed.unwrap_or(directed_default));
    }
    Ok(net)
}

fn node_agents(doc: &RawDoc, net: &Network) -> Result<Vec<Agent>, ModelError> {
    doc.agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let node = a.node.as_ref().ok_or_else(|| ModelError::Malformed(format!("agent {i} has no node")))?;
            if a.energy.is_negative() {
                return Err(ModelError::NegativeEnergy(i));
            }
            Ok(Agent { node: net.node_id(&node.text())?, energy: a.energy.clone() })
        })
        .collect()
}

/// Parses an instance document (JSON).
pub fn parse_instance(text: &str) -> Result<InstanceDoc, ModelError> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
    let kind = raw.kind.as_str();
    match kind {
        "line" => {
            let agents = raw
                .agents
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let x = a
                        .position
                        .clone()
                        .ok_or_else(|| ModelError::Malformed(format!("agent {i} has no position")))?;
                    Ok((x, a.energy.clone()))
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            let (inst, merge) = LineInstance::from_agents(&agents)?;
            Ok(InstanceDoc {
                instance: Instance::Line(inst),
                task: raw.task,
                line_merge: Some(merge),
                line_energies: agents.into_iter().map(|a| a.1).collect(),
            })
        }
        "tree" | "graph" | "digraph" => {
            let net = build_network(&raw, kind == "digraph")?;
            let agents = node_agents(&raw, &net)?;
            let instance = if kind == "tree" {
                Instance::Tree(TreeInstance::new(net, agents)?)
            } else {
                Instance::Graph(GraphInstance::new(net, agents)?)
            };
            Ok(InstanceDoc { instance, task: raw.task, line_merge: None, line_energies: Vec::new() })
        }
        other => Err(ModelError::Malformed(format!("unknown kind `{other}`"))),
    }
}

fn net_raw(net: &Network) -> (Vec<Label>, Vec<RawEdge>) {
    let nodes = net.labels().iter().map(|l| Label::Text(l.clone())).collect();
    let edges = net
        .edges()
        .iter()
        .map(|e| RawEdge {
            u: Label::Text(net.label(e.u).to_string()),
            v: Label::Text(net.label(e.v).to_string()),
            length: e.length.clone(),
            directed: None,
        })
        .collect();
    (nodes, edges)
}

/// Serializes an instance (and optional task) to a document.
pub fn instance_to_json(instance: &Instance, task: Option<&Task>) -> serde_json::Value {
    let raw = match instance {
        Instance::Line(l) => RawDoc {
            kind: "line".into(),
            nodes: vec![],
            edges: vec![],
            agents: (0..l.n())
                .map(|i| RawAgent { node: None, position: Some(l.position(i).clone()), energy: l.energy(i).clone() })
                .collect(),
            task: task.cloned(),
        },
        Instance::Tree(TreeInstance { net, agents }) | Instance::Graph(GraphInstance { net, agents }) => {
            let directed = net.is_directed();
            let (nodes, mut edges) = net_raw(net);
            for (raw, e) in edges.iter_mut().zip(net.edges()) {
                if e.directed {
                    raw.directed = Some(true);
                }
            }
            let kind = match instance {
                Instance::Tree(_) => "tree",
                _ if directed && net.edges().iter().all(|e| e.directed) => "digraph",
                _ => "graph",
            };
            if kind == "digraph" {
                for raw in &mut edges {
                    raw.directed = None;
                }
            }
            RawDoc {
                kind: kind.into(),
                nodes,
                edges,
                agents: agents
                    .iter()
                    .map(|a| RawAgent {
                        node: Some(Label::Text(net.label(a.node).to_string())),
                        position: None,
                        energy: a.energy.clone(),
                    })
                    .collect(),
                task: task.cloned(),
            }
        }
    };
    serde_json::to_value(raw).expect("documents always serialize")
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ModelError> {
    serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))
}

// ---------------------------------------------------------------------------
// Delivery normalization

/// A line delivery problem rewritten so that the packet starts at the first
/// agent and must reach the last one.
#[derive(Debug, Clone)]
pub struct NormalizedDelivery {
    pub instance: LineInstance,
    /// Whether the original problem was reflected to make `source < target`.
    pub mirrored: bool,
    /// Normalized agent -> original agent; `None` for a virtual agent.
    agent_map: Vec<Option<AgentId>>,
    /// Steps (in original coordinates and ids) that fold the outer agents in.
    prefix: Schedule,
}

impl NormalizedDelivery {
    pub fn is_identity(&self) -> bool {
        !self.mirrored && self.prefix.is_empty() && self.agent_map.iter().enumerate().all(|(i, a)| *a == Some(i))
    }

    pub fn original_agent(&self, i: AgentId) -> Option<AgentId> {
        self.agent_map[i]
    }

    /// Translates a schedule over the normalized instance back to the
    /// original instance, prepending the folding moves.
    pub fn lift(&self, schedule: &Schedule) -> Result<Schedule, SolveError> {
        let mirrored = self.mirrored;
        let body = schedule.map(
            |a| self.agent_map[a],
            |p| match p {
                Point::Coord(x) if mirrored => Point::Coord(-x),
                other => other.clone(),
            },
        )?;
        let mut out = self.prefix.clone();
        out.extend(body);
        Ok(out)
    }
}

/// Folds agents outside `[from, to]` toward the nearer endpoint.
///
/// `outer` lists agents beyond the endpoint, ordered from the far end
/// toward `end`. Returns the energy that reaches `end` and the agent that
/// arrives there, if any.
fn fold(
    inst: &LineInstance,
    outer: &[AgentId],
    end: &Rational,
    ids: &dyn Fn(AgentId) -> AgentId,
    coord: &dyn Fn(&Rational) -> Rational,
    out: &mut Schedule,
) -> (Rational, Option<AgentId>) {
    let mut walker: Option<(AgentId, Rational)> = None;
    let mut at = Rational::zero();
    let dist = |a: &Rational, b: &Rational| (a - b).abs();
    for &j in outer {
        let xj = inst.position(j);
        match walker.take() {
            Some((w, carried)) => {
                let d = dist(xj, &at);
                if carried >= d {
                    out.walk(ids(w), Point::Coord(coord(&at)), Point::Coord(coord(xj)));
                    out.give(ids(j), ids(w), inst.energy(j).clone());
                    walker = Some((w, &carried - &d + inst.energy(j)));
                } else {
                    // stranded short of the next agent
                    let stop = if xj > &at { &at + &carried } else { &at - &carried };
                    out.walk(ids(w), Point::Coord(coord(&at)), Point::Coord(coord(&stop)));
                    walker = Some((j, inst.energy(j).clone()));
                }
            }
            None => walker = Some((j, inst.energy(j).clone())),
        }
        at = xj.clone();
    }
    match walker {
        None => (Rational::zero(), None),
        Some((w, carried)) => {
            let d = dist(end, &at);
            if carried >= d {
                out.walk(ids(w), Point::Coord(coord(&at)), Point::Coord(coord(end)));
                (&carried - &d, Some(w))
            } else {
                let stop = if end > &at { &at + &carried } else { &at - &carried };
                out.walk(ids(w), Point::Coord(coord(&at)), Point::Coord(coord(&stop)));
                (Rational::zero(), None)
            }
        }
    }
}

/// Reduces delivery from `source` to `target` (`source != target`) to the
/// case where the packet sits at the first agent and must reach the last.
pub fn normalize_delivery(inst: &LineInstance, source: &Rational, target: &Rational) -> NormalizedDelivery {
    assert!(source != target, "normalize_delivery requires distinct endpoints");
    let mirrored = source > target;
    let n = inst.n();
    let (work, s, t) = if mirrored { (inst.mirror(), -source, -target) } else { (inst.clone(), source.clone(), target.clone()) };
    let ids = move |j: AgentId| if mirrored { n - 1 - j } else { j };
    let coord = move |x: &Rational| if mirrored { -x } else { x.clone() };

    let left: Vec<AgentId> = (0..n).filter(|&j| work.position(j) < &s).collect();
    let mut right: Vec<AgentId> = (0..n).filter(|&j| work.position(j) > &t).collect();
    right.reverse();
    let at_s = work.index_of(&s);
    let at_t = work.index_of(&t);
    let interior: Vec<AgentId> = (0..n).filter(|&j| work.position(j) > &s && work.position(j) < &t).collect();

    let mut prefix = Schedule::new();
    let (e_left, w_left) = fold(&work, &left, &s, &ids, &coord, &mut prefix);
    let (e_right, w_right) = fold(&work, &right, &t, &ids, &coord, &mut prefix);

    let mut endpoint = |fold_energy: Rational, walker: Option<AgentId>, resident: Option<AgentId>| {
        let own = resident.map(|r| work.energy(r).clone()).unwrap_or_default();
        let rep = match (resident, walker) {
            (Some(r), Some(w)) => {
                prefix.give(ids(w), ids(r), fold_energy.clone());
                Some(r)
            }
            (Some(r), None) => Some(r),
            (None, w) => w,
        };
        (&fold_energy + &own, rep.map(ids))
    };
    let (es, rep_s) = endpoint(e_left, w_left, at_s);
    let (et, rep_t) = endpoint(e_right, w_right, at_t);

    let mut positions = vec![s.clone()];
    let mut energies = vec![es];
    let mut agent_map = vec![rep_s];
    for &j in &interior {
        positions.push(work.position(j).clone());
        energies.push(work.energy(j).clone());
        agent_map.push(Some(ids(j)));
    }
    positions.push(t.clone());
    energies.push(et);
    agent_map.push(rep_t);

    NormalizedDelivery {
        instance: LineInstance::new(positions, energies).expect("normalized positions are increasing"),
        mirrored,
        agent_map,
        prefix,
    }
}

/// Brings every agent that can reach `x` there, pooling energy on one agent.
/// Returns the energy that ends up at `x` and the schedule doing it.
pub fn gather_at(inst: &LineInstance, x: &Rational) -> (Rational, Schedule) {
    let mut out = Schedule::new();
    let left: Vec<AgentId> = (0..inst.n()).filter(|&j| inst.position(j) < x).collect();
    let mut right: Vec<AgentId> = (0..inst.n()).filter(|&j| inst.position(j) > x).collect();
    right.reverse();
    let id = |j| j;
    let c = |y: &Rational| y.clone();
    let (a, wa) = fold(inst, &left, x, &id, &c, &mut out);
    let (b, wb) = fold(inst, &right, x, &id, &c, &mut out);
    let resident = inst.index_of(x);
    let own = resident.map(|i| inst.energy(i).clone()).unwrap_or_default();
    if let Some(keeper) = resident.or(wa).or(wb) {
        if let Some(w) = wa {
            out.give(w, keeper, a.clone());
        }
        if let Some(w) = wb {
            out.give(w, keeper, b.clone());
        }
    }
    (a + b + own, out)
}
