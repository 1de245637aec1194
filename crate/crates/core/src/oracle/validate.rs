//! Schedule replay.

use std::fmt::Debug;
use std::rc::Rc;

use serde::Serialize;

use crate::model::{AgentId, Instance, LineInstance, Loc, Network, Point, Schedule, Step, Task};
use crate::rational::Rational;

/// How points are resolved and how far apart they are.
pub trait Geometry {
    type Loc: Clone + Eq + Debug;
    type Seg;

    fn resolve(&self, p: &Point) -> Result<Self::Loc, String>;
    fn point(&self, loc: &Self::Loc) -> Point;
    /// The straight piece of a path from `a` to `b`, if it is legal.
    fn segment(&self, a: &Self::Loc, b: &Self::Loc) -> Result<(Self::Seg, Rational), String>;
    /// Distance from the segment start if `x` lies on it.
    fn offset_on(&self, seg: &Self::Seg, x: &Self::Loc) -> Option<Rational>;
}

pub struct LineGeometry;

impl Geometry for LineGeometry {
    type Loc = Rational;
    type Seg = (Rational, Rational);

    fn resolve(&self, p: &Point) -> Result<Rational, String> {
        p.coord().cloned().ok_or_else(|| format!("{p:?} is not a line coordinate"))
    }

    fn point(&self, loc: &Rational) -> Point {
        Point::Coord(loc.clone())
    }

    fn segment(&self, a: &Rational, b: &Rational) -> Result<((Rational, Rational), Rational), String> {
        Ok(((a.clone(), b.clone()), (b - a).abs()))
    }

    fn offset_on(&self, (a, b): &(Rational, Rational), x: &Rational) -> Option<Rational> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (lo <= x && x <= hi).then(|| (x - a).abs())
    }
}

pub struct NetworkGeometry<'a>(pub &'a Network);

/// A piece of one edge, walked from offset `from` to offset `to`.
pub struct EdgeSeg {
    edge: Option<usize>,
    at: Loc,
    from: Rational,
    to: Rational,
}

impl NetworkGeometry<'_> {
    fn offset(&self, edge: usize, x: &Loc) -> Option<Rational> {
        let e = self.0.edge(edge);
        match x {
            Loc::Node(u) if *u == e.u => Some(Rational::zero()),
            Loc::Node(u) if *u == e.v => Some(e.length.clone()),
            Loc::Edge(f, off) if *f == edge => Some(off.clone()),
            _ => None,
        }
    }

    fn candidate_edges(&self, x: &Loc) -> Vec<usize> {
        match x {
            Loc::Node(u) => self.0.incident(*u).iter().map(|&(e, _)| e).collect(),
            Loc::Edge(e, _) => vec![*e],
        }
    }
}

impl Geometry for NetworkGeometry<'_> {
    type Loc = Loc;
    type Seg = EdgeSeg;

    fn resolve(&self, p: &Point) -> Result<Loc, String> {
        self.0.loc(p).map_err(|e| e.to_string())
    }

    fn point(&self, loc: &Loc) -> Point {
        self.0.point(loc)
    }

    fn segment(&self, a: &Loc, b: &Loc) -> Result<(EdgeSeg, Rational), String> {
        if a == b {
            let seg = EdgeSeg { edge: None, at: a.clone(), from: Rational::zero(), to: Rational::zero() };
            return Ok((seg, Rational::zero()));
        }
        let mut best: Option<(EdgeSeg, Rational)> = None;
        for e in self.candidate_edges(a) {
            let (Some(oa), Some(ob)) = (self.offset(e, a), self.offset(e, b)) else { continue };
            if self.0.edge(e).directed && ob < oa {
                continue;
            }
            let len = (&ob - &oa).abs();
            if best.as_ref().is_none_or(|(_, l)| &len < l) {
                best = Some((EdgeSeg { edge: Some(e), at: a.clone(), from: oa, to: ob }, len));
            }
        }
        best.ok_or_else(|| format!("no edge leads from {a:?} to {b:?}"))
    }

    fn offset_on(&self, seg: &EdgeSeg, x: &Loc) -> Option<Rational> {
        let Some(e) = seg.edge else {
            return (x == &seg.at).then(Rational::zero);
        };
        let off = self.offset(e, x)?;
        let (lo, hi) = if seg.from <= seg.to { (&seg.from, &seg.to) } else { (&seg.to, &seg.from) };
        (lo <= &off && &off <= hi).then(|| (&off - &seg.from).abs())
    }
}

/// A bit set of information tokens (agents, then the packet), shared between
/// agents until modified.
type Info = Rc<Vec<u64>>;

fn union(a: &Info, b: &Info) -> Info {
    if Rc::ptr_eq(a, b) {
        return a.clone();
    }
    Rc::new(a.iter().zip(b.iter()).map(|(x, y)| x | y).collect())
}

fn has(info: &Info, bit: usize) -> bool {
    info[bit / 64] >> (bit % 64) & 1 == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub step: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    pub positions: Vec<Point>,
    pub energies: Vec<Rational>,
    /// Agents whose information each agent holds.
    pub info: Vec<Vec<AgentId>>,
    /// Whether each agent holds the packet (delivery only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub packet: Vec<bool>,
    pub task_achieved: bool,
    /// Delivery: energy at the target. Other tasks: total remaining energy.
    pub surplus_at_target: Rational,
}

impl ValidationReport {
    /// Whether the schedule is legal and achieves the task.
    pub fn passed(&self) -> bool {
        self.ok && self.task_achieved
    }
}

struct Replay<'g, G: Geometry> {
    geo: &'g G,
    pos: Vec<G::Loc>,
    energy: Vec<Rational>,
    info: Vec<Info>,
    n: usize,
    packet_at: Option<G::Loc>,
    target: Option<G::Loc>,
    delivered: bool,
}

impl<G: Geometry> Replay<'_, G> {
    fn note_target(&mut self, a: AgentId, at: &G::Loc) {
        if let Some(t) = &self.target {
            if t == at && has(&self.info[a], self.n) {
                self.delivered = true;
            }
        }
    }

    /// Merges information of everyone at `at` with agent `a`.
    fn meet(&mut self, a: AgentId, at: &G::Loc) {
        if self.packet_at.as_ref() == Some(at) {
            let bit = self.n;
            let mut v = (*self.info[a]).clone();
            v[bit / 64] |= 1 << (bit % 64);
            self.info[a] = Rc::new(v);
        }
        let mut merged = self.info[a].clone();
        let group: Vec<AgentId> = (0..self.pos.len()).filter(|&j| j != a && &self.pos[j] == at).collect();
        for &j in &group {
            merged = union(&merged, &self.info[j]);
        }
        for &j in &group {
            self.info[j] = merged.clone();
        }
        self.info[a] = merged;
        for j in group.into_iter().chain([a]) {
            self.note_target(j, at);
        }
    }

    fn step(&mut self, step: &Step) -> Result<(), String> {
        match step {
            Step::Move { agent, path } => {
                let a = *agent;
                if a >= self.pos.len() {
                    return Err(format!("unknown agent {a}"));
                }
                if path.is_empty() {
                    return Err("empty path".into());
                }
                let locs = path.iter().map(|p| self.geo.resolve(p)).collect::<Result<Vec<_>, _>>()?;
                if locs[0] != self.pos[a] {
                    return Err(format!("agent {a} teleports: path starts away from its position"));
                }
                for w in locs.windows(2) {
                    let (seg, len) = self.geo.segment(&w[0], &w[1])?;
                    if len > self.energy[a] {
                        return Err(format!("negative energy for agent {a}"));
                    }
                    // everyone and everything met along the way, in order
                    let mut events: Vec<(Rational, G::Loc)> = Vec::new();
                    for j in 0..self.pos.len() {
                        if j != a {
                            if let Some(off) = self.geo.offset_on(&seg, &self.pos[j]) {
                                events.push((off, self.pos[j].clone()));
                            }
                        }
                    }
                    for special in [self.packet_at.clone(), self.target.clone()].into_iter().flatten() {
                        if let Some(off) = self.geo.offset_on(&seg, &special) {
                            events.push((off, special));
                        }
                    }
                    events.sort_by(|x, y| x.0.cmp(&y.0));
                    self.energy[a] -= &len;
                    for (_, at) in events {
                        self.meet(a, &at);
                    }
                    self.pos[a] = w[1].clone();
                    let here = w[1].clone();
                    self.meet(a, &here);
                }
                Ok(())
            }
            Step::Transfer { from, to, amount } => {
                let (f, t) = (*from, *to);
                if f >= self.pos.len() || t >= self.pos.len() {
                    return Err(format!("unknown agent in transfer {f}->{t}"));
                }
                if amount.is_negative() {
                    return Err(format!("negative transfer amount {amount}"));
                }
                if self.pos[f] != self.pos[t] {
                    return Err(format!("transfer without meeting: agents {f} and {t} are apart"));
                }
                if amount > &self.energy[f] {
                    return Err(format!("insufficient energy: agent {f} cannot give {amount}"));
                }
                self.energy[f] -= amount;
                self.energy[t] += amount;
                Ok(())
            }
        }
    }
}

fn replay<G: Geometry>(
    geo: &G,
    starts: Vec<G::Loc>,
    energies: Vec<Rational>,
    task: &Task,
    schedule: &Schedule,
) -> Result<ValidationReport, String> {
    let n = starts.len();
    let words = (n + 1).div_ceil(64);
    let (packet_at, target) = match task {
        Task::Delivery { source, target } => (Some(geo.resolve(source)?), Some(geo.resolve(target)?)),
        _ => (None, None),
    };
    if let Task::Broadcast { source: Some(s) } = task {
        if *s >= n {
            return Err(format!("unknown broadcast source {s}"));
        }
    }
    let info = (0..n)
        .map(|i| {
            let mut v = vec![0u64; words];
            v[i / 64] |= 1 << (i % 64);
            Rc::new(v)
        })
        .collect();
    // a packet that starts at its target is already delivered
    let delivered = packet_at.is_some() && packet_at == target;
    let mut r = Replay { geo, pos: starts, energy: energies, info, n, packet_at, target, delivered };
    for a in 0..n {
        let here = r.pos[a].clone();
        r.meet(a, &here);
    }
    let mut violation = None;
    for (k, step) in schedule.steps.iter().enumerate() {
        if let Err(reason) = r.step(step) {
            violation = Some(Violation { step: k, reason });
            break;
        }
    }
    let task_achieved = match task {
        Task::Delivery { .. } => r.delivered,
        Task::Convergecast => r.info.iter().any(|s| (0..n).all(|j| has(s, j))),
        Task::Broadcast { source } => match source {
            Some(s) => r.info.iter().all(|i| has(i, *s)),
            None => (0..n).any(|s| r.info.iter().all(|i| has(i, s))),
        },
    };
    let surplus_at_target = match &r.target {
        Some(t) => (0..n).filter(|&j| &r.pos[j] == t).map(|j| r.energy[j].clone()).sum(),
        None => r.energy.iter().sum(),
    };
    let packet = match task {
        Task::Delivery { .. } => r.info.iter().map(|s| has(s, n)).collect(),
        _ => Vec::new(),
    };
    Ok(ValidationReport {
        ok: violation.is_none(),
        violation,
        positions: r.pos.iter().map(|l| geo.point(l)).collect(),
        energies: r.energy,
        info: r.info.iter().map(|s| (0..n).filter(|&j| has(s, j)).collect()).collect(),
        packet,
        task_achieved,
        surplus_at_target,
    })
}

fn structural(reason: String) -> ValidationReport {
    ValidationReport {
        ok: false,
        violation: Some(Violation { step: 0, reason }),
        positions: Vec::new(),
        energies: Vec::new(),
        info: Vec::new(),
        packet: Vec::new(),
        task_achieved: false,
        surplus_at_target: Rational::zero(),
    }
}

pub fn validate_line(inst: &LineInstance, task: &Task, schedule: &Schedule) -> ValidationReport {
    replay(&LineGeometry, inst.positions().to_vec(), inst.energies().to_vec(), task, schedule)
        .unwrap_or_else(structural)
}

/// Like [`validate_line`], for agents given one by one; several may share a
/// position.
pub fn validate_line_agents(
    positions: &[Rational],
    energies: &[Rational],
    task: &Task,
    schedule: &Schedule,
) -> ValidationReport {
    replay(&LineGeometry, positions.to_vec(), energies.to_vec(), task, schedule).unwrap_or_else(structural)
}

/// Replays `schedule` on `inst` and checks it against `task`.
pub fn validate_schedule(inst: &Instance, task: &Task, schedule: &Schedule) -> ValidationReport {
    match inst {
        Instance::Line(l) => validate_line(l, task, schedule),
        Instance::Tree(t) => validate_network(&t.net, &t.agents, task, schedule),
        Instance::Graph(g) => validate_network(&g.net, &g.agents, task, schedule),
    }
}

pub fn validate_network(
    net: &Network,
    agents: &[crate::model::Agent],
    task: &Task,
    schedule: &Schedule,
) -> ValidationReport {
    let starts = agents.iter().map(|a| Loc::Node(a.node)).collect();
    let energies = agents.iter().map(|a| a.energy.clone()).collect();
    replay(&NetworkGeometry(net), starts, energies, task, schedule).unwrap_or_else(structural)
}
