//! Exhaustive search over a discretized configuration space.
//!
//! Positions live on a grid of step `g` laid over the instance, energies are
//! counted in multiples of `g`. The energy of co-located agents is pooled on
//! the lowest-indexed of them; a departing agent takes any amount that covers
//! its first step. Among co-located agents only the highest-indexed one moves,
//! which loses nothing since co-located agents share their information.
//! Only the information the task needs is tracked.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::error::{ModelError, SolveError};
use crate::model::{AgentId, Instance, LineInstance, Loc, Network, Point, Schedule, Task};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Grid step for positions and energies.
    pub resolution: Rational,
    /// Maximum number of stored configurations.
    pub max_states: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { resolution: Rational::new(1, 4), max_states: 2_000_000 }
    }
}

impl SearchConfig {
    pub fn with_resolution(resolution: Rational) -> Self {
        Self { resolution, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Schedule),
    /// No schedule exists at this resolution.
    NotFound,
    /// The state budget ran out first.
    Exhausted,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Schedule> {
        match self {
            SearchOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurplusOutcome {
    Best { surplus: Rational, schedule: Schedule },
    NotFound,
    Exhausted,
}

impl SurplusOutcome {
    pub fn surplus(&self) -> Option<&Rational> {
        match self {
            SurplusOutcome::Best { surplus, .. } => Some(surplus),
            _ => None,
        }
    }
}

/// The instance laid out as a graph of grid points.
struct Grid {
    adj: Vec<Vec<(u32, i64)>>,
    points: Vec<Point>,
    starts: Vec<u32>,
    energies: Vec<i64>,
    unit: Rational,
}

fn units(x: &Rational, g: &Rational, what: &str) -> Result<i64, SolveError> {
    x.units_of(g).ok_or_else(|| {
        SolveError::Model(ModelError::Unsupported(format!("{what} {x} is not a multiple of the resolution {g}")))
    })
}

impl Grid {
    fn line(inst: &LineInstance, extra: &[&Rational], g: &Rational) -> Result<Self, SolveError> {
        let lo = inst.positions().iter().chain(extra.iter().copied()).min().expect("non-empty").clone();
        let hi = inst.positions().iter().chain(extra.iter().copied()).max().expect("non-empty").clone();
        let m = units(&(&hi - &lo), g, "span")? as usize + 1;
        let mut adj = vec![Vec::new(); m];
        for k in 1..m {
            adj[k - 1].push((k as u32, 1));
            adj[k].push(((k - 1) as u32, 1));
        }
        let points = (0..m).map(|k| Point::Coord(&lo + &(g * &Rational::from_int(k as i64)))).collect();
        let starts = inst
            .positions()
            .iter()
            .map(|x| units(&(x - &lo), g, "position").map(|k| k as u32))
            .collect::<Result<_, _>>()?;
        let energies = inst.energies().iter().map(|e| units(e, g, "energy")).collect::<Result<_, _>>()?;
        Ok(Self { adj, points, starts, energies, unit: g.clone() })
    }

    fn network(net: &Network, agents: &[crate::model::Agent], g: &Rational) -> Result<(Self, Vec<Vec<u32>>), SolveError> {
        let mut points: Vec<Point> = net.labels().iter().map(|l| Point::node(l.clone())).collect();
        let mut adj: Vec<Vec<(u32, i64)>> = vec![Vec::new(); net.node_count()];
        // grid ids of every edge's points, by offset index
        let mut along = Vec::with_capacity(net.edge_count());
        for (id, e) in net.edges().iter().enumerate() {
            let len = units(&e.length, g, "edge length")? as usize;
            let mut ids = vec![e.u as u32];
            for k in 1..len {
                ids.push(points.len() as u32);
                points.push(Point::Edge { edge: id, offset: g * &Rational::from_int(k as i64) });
                adj.push(Vec::new());
            }
            ids.push(e.v as u32);
            let cost = if len == 0 { 0 } else { 1 };
            for w in ids.windows(2) {
                adj[w[0] as usize].push((w[1], cost));
                if !e.directed {
                    adj[w[1] as usize].push((w[0], cost));
                }
            }
            along.push(ids);
        }
        let starts = agents.iter().map(|a| a.node as u32).collect();
        let energies = agents.iter().map(|a| units(&a.energy, g, "energy")).collect::<Result<_, _>>()?;
        Ok((Self { adj, points, starts, energies, unit: g.clone() }, along))
    }
}

impl Grid {
    /// Breadth-first order from `root` with parents, if the grid is an
    /// undirected tree.
    fn rooted_at(&self, root: u32) -> Option<Vec<(u32, u32, i64)>> {
        let m = self.adj.len();
        let arcs: usize = self.adj.iter().map(Vec::len).sum();
        if arcs != 2 * (m - 1) {
            return None;
        }
        let mut seen = vec![false; m];
        seen[root as usize] = true;
        let mut order = vec![(root, root, 0)];
        let mut k = 0;
        while k < order.len() {
            let u = order[k].0;
            for &(v, c) in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    order.push((v, u, c));
                }
            }
            k += 1;
        }
        (order.len() == m).then_some(order)
    }

    /// All-pairs shortest distances (0/1 edge costs).
    fn distances(&self) -> Vec<Vec<i64>> {
        let m = self.adj.len();
        (0..m)
            .map(|src| {
                let mut d = vec![i64::MAX / 4; m];
                let mut dq = VecDeque::from([src as u32]);
                d[src] = 0;
                while let Some(u) = dq.pop_front() {
                    for &(v, c) in &self.adj[u as usize] {
                        let nd = d[u as usize] + c;
                        if nd < d[v as usize] {
                            d[v as usize] = nd;
                            if c == 0 {
                                dq.push_front(v);
                            } else {
                                dq.push_back(v);
                            }
                        }
                    }
                }
                d
            })
            .collect()
    }
}

fn network_node(net: &Network, along: &[Vec<u32>], g: &Rational, p: &Point) -> Result<u32, SolveError> {
    match net.loc(p)? {
        Loc::Node(u) => Ok(u as u32),
        Loc::Edge(e, off) => Ok(along[e][units(&off, g, "offset")? as usize]),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Delivery { s: u32, t: u32 },
    Convergecast,
    /// Convergecast completed by an agent standing at a given grid point.
    ConvergecastAt { at: u32 },
    Broadcast { source: usize },
}

/// Largest number of agents the search handles.
pub const MAX_AGENTS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct State {
    pos: [u16; MAX_AGENTS],
    energy: [i32; MAX_AGENTS],
    info: [u16; MAX_AGENTS],
    delivered: bool,
}

type Key = ([u16; MAX_AGENTS], bool);

/// Position of an agent that can no longer contribute.
const RETIRED: u16 = u16::MAX;

impl State {
    fn key(&self) -> Key {
        (self.pos, self.delivered)
    }

    fn total(&self) -> i64 {
        self.energy.iter().map(|&e| e as i64).sum()
    }
}

#[derive(Clone, Copy)]
struct Action {
    agent: u8,
    from: u16,
    to: u16,
    take: i32,
    cost: i32,
}

struct Entry {
    state: State,
    parent: u32,
    action: Option<Action>,
    /// Superseded by a dominating state found later.
    dead: bool,
}

const ROOT: u32 = u32::MAX;

struct Search<'a> {
    grid: &'a Grid,
    goal: Goal,
    n: usize,
    /// Grid distances in quanta.
    dist: Vec<Vec<i64>>,
    /// For delivery on tree-shaped grids: nodes in breadth-first order from
    /// the target, with parent and edge cost.
    toward_target: Option<Vec<(u32, u32, i64)>>,
}

impl<'a> Search<'a> {
    fn new(grid: &'a Grid, goal: Goal) -> Self {
        let toward_target = match goal {
            Goal::Delivery { t, .. } => grid.rooted_at(t),
            _ => None,
        };
        Search { n: grid.starts.len(), grid, goal, dist: grid.distances(), toward_target }
    }

    fn packet_bit(&self) -> u16 {
        1 << self.n
    }

    /// Pools energy and merges information at node `at`.
    fn settle(&self, st: &mut State, at: u16) {
        let mut mask = 0u16;
        let mut pool = 0i32;
        let mut first = usize::MAX;
        for j in 0..self.n {
            if st.pos[j] == at {
                mask |= st.info[j];
                pool += st.energy[j];
                first = first.min(j);
            }
        }
        if let Goal::Delivery { s, t } = self.goal {
            if at as u32 == s {
                mask |= self.packet_bit();
            }
            if at as u32 == t && mask & self.packet_bit() != 0 {
                st.delivered = true;
            }
        }
        for j in 0..self.n {
            if st.pos[j] == at {
                st.info[j] = mask;
                st.energy[j] = if j == first { pool } else { 0 };
            }
        }
    }

    /// Retires agents without energy whose information is already held by
    /// another agent (for delivery: who lack the packet). Delivery and
    /// convergecast only ever merge groups, so whatever such an agent would do
    /// after receiving energy, the giver can do itself at the same cost.
    fn retire(&self, st: &mut State) {
        for j in 0..self.n {
            if st.pos[j] == RETIRED || st.energy[j] != 0 {
                continue;
            }
            let useless = match self.goal {
                Goal::Delivery { .. } => st.info[j] & self.packet_bit() == 0,
                // a spare body can split off and inform a different branch
                Goal::Broadcast { .. } => false,
                _ => (0..self.n).any(|k| k != j && st.pos[k] != RETIRED && st.info[j] & !st.info[k] == 0),
            };
            if useless {
                st.pos[j] = RETIRED;
            }
        }
    }

    fn initial(&self) -> State {
        let delivered = matches!(self.goal, Goal::Delivery { s, t } if s == t);
        let mut st = State { pos: [0; MAX_AGENTS], energy: [0; MAX_AGENTS], info: [0; MAX_AGENTS], delivered };
        for i in 0..self.n {
            st.pos[i] = self.grid.starts[i] as u16;
            st.energy[i] = self.grid.energies[i] as i32;
            st.info[i] = match self.goal {
                Goal::Delivery { .. } => 0,
                Goal::Convergecast | Goal::ConvergecastAt { .. } => 1 << i,
                Goal::Broadcast { source } => u16::from(i == source) << i,
            };
        }
        for i in 0..self.n {
            let at = st.pos[i];
            self.settle(&mut st, at);
        }
        self.retire(&mut st);
        st
    }

    fn achieved(&self, st: &State) -> bool {
        let all = (1u16 << self.n) - 1;
        let info = &st.info[..self.n];
        match self.goal {
            Goal::Delivery { .. } => st.delivered,
            Goal::Convergecast => info.iter().any(|m| m & all == all),
            Goal::ConvergecastAt { at } => (0..self.n).any(|j| st.pos[j] as u32 == at && info[j] & all == all),
            Goal::Broadcast { source } => info.iter().all(|m| m >> source & 1 == 1),
        }
    }

    fn surplus(&self, st: &State) -> i64 {
        match self.goal {
            Goal::Delivery { t, .. } => {
                (0..self.n).filter(|&j| st.pos[j] as u32 == t).map(|j| st.energy[j] as i64).sum()
            }
            _ => st.total(),
        }
    }

    fn successors(&self, st: &State, out: &mut Vec<(State, Action)>) {
        for a in 0..self.n {
            let u = st.pos[a];
            if u == RETIRED {
                continue;
            }
            // only the highest-indexed agent of a group moves; the lowest holds the pool
            if (a + 1..self.n).any(|j| st.pos[j] == u) {
                continue;
            }
            let holder = (0..a).find(|&j| st.pos[j] == u).unwrap_or(a);
            let pool = st.energy[holder];
            for &(v, cost) in &self.grid.adj[u as usize] {
                let cost = cost as i32;
                if pool < cost {
                    continue;
                }
                let least = if holder == a { pool } else { cost };
                for take in least..=pool {
                    let mut next = *st;
                    next.energy[holder] = pool - take;
                    next.energy[a] = take - cost;
                    next.pos[a] = v as u16;
                    self.settle(&mut next, v as u16);
                    self.retire(&mut next);
                    out.push((next, Action { agent: a as u8, from: u, to: v as u16, take, cost }));
                }
            }
        }
    }

    fn dominates(a: &State, b: &State) -> bool {
        a.energy.iter().zip(&b.energy).all(|(x, y)| x >= y) && a.info.iter().zip(&b.info).all(|(x, y)| x & y == *y)
    }

    /// Lower bound on the energy still to be spent before delivery.
    fn remaining(&self, st: &State) -> i64 {
        let Goal::Delivery { s, t } = self.goal else { return 0 };
        if st.delivered {
            return 0;
        }
        let d = &self.dist;
        let holders = (0..self.n).filter(|&j| st.info[j] & self.packet_bit() != 0);
        match holders.map(|j| d[st.pos[j] as usize][t as usize]).min() {
            Some(x) => x,
            None => {
                let reach = (0..self.n).filter(|&j| st.pos[j] != RETIRED).map(|j| d[st.pos[j] as usize][s as usize]).min().unwrap_or(i64::MAX / 4);
                reach.saturating_add(d[s as usize][t as usize])
            }
        }
    }

    /// Search priority: closeness to the goal.
    fn progress(&self, st: &State) -> i64 {
        let info = &st.info[..self.n];
        match self.goal {
            Goal::Delivery { .. } => self.remaining(st),
            Goal::Convergecast | Goal::ConvergecastAt { .. } => {
                self.n as i64 - info.iter().map(|m| m.count_ones() as i64).max().unwrap_or(0)
            }
            Goal::Broadcast { source } => info.iter().filter(|m| *m >> source & 1 == 0).count() as i64,
        }
    }

    /// Upper bound on the surplus of any goal state reachable from `st`.
    fn bound(&self, st: &State) -> i64 {
        let simple = st.total() - self.remaining(st);
        match &self.toward_target {
            Some(order) => simple.min(self.gatherable(st, order)),
            None => simple,
        }
    }

    /// Most energy that could be brought to the target on a tree-shaped
    /// grid, ignoring the packet: each subtree sends what survives the trip.
    fn gatherable(&self, st: &State, order: &[(u32, u32, i64)]) -> i64 {
        let mut val = vec![0i64; self.grid.adj.len()];
        for j in (0..self.n).filter(|&j| st.pos[j] != RETIRED) {
            val[st.pos[j] as usize] += st.energy[j] as i64;
        }
        for &(v, parent, cost) in order.iter().skip(1).rev() {
            let up = (val[v as usize] - cost).max(0);
            val[parent as usize] += up;
        }
        val[order[0].0 as usize]
    }

    /// Best-first exploration with dominance pruning. With `exhaustive` the
    /// space is explored (branch and bound on the surplus) and the goal state
    /// with the largest surplus is returned; otherwise the first goal found.
    fn run(&self, max_states: usize, exhaustive: bool) -> Result<Option<(Vec<Entry>, usize)>, ()> {
        let mut arena: Vec<Entry> = Vec::new();
        let mut seen: HashMap<Key, Vec<u32>> = HashMap::new();
        let mut queue = BinaryHeap::new();
        let start = self.initial();
        let mut best: Option<(i64, usize)> = None;
        // delivery is steered by the surplus bound, the others by progress
        let by_bound = exhaustive || matches!(self.goal, Goal::Delivery { .. });
        let key = |st: &State, id: usize| {
            if by_bound {
                Reverse((-self.bound(st), self.progress(st), id))
            } else {
                Reverse((self.progress(st), -st.total(), id))
            }
        };
        seen.entry(start.key()).or_default().push(0);
        arena.push(Entry { state: start, parent: ROOT, action: None, dead: false });
        if self.achieved(&start) {
            if !exhaustive {
                return Ok(Some((arena, 0)));
            }
            best = Some((self.surplus(&start), 0));
        }
        queue.push(key(&start, 0));
        let mut buf = Vec::new();
        while let Some(Reverse((_, _, idx))) = queue.pop() {
            if arena[idx].dead {
                continue;
            }
            let here = arena[idx].state;
            if let Some((b, _)) = best {
                if self.bound(&here) <= b {
                    continue;
                }
            }
            buf.clear();
            self.successors(&here, &mut buf);
            for (next, action) in buf.drain(..) {
                if let Some((b, _)) = best {
                    if self.bound(&next) <= b {
                        continue;
                    }
                }
                let bucket = seen.entry(next.key()).or_default();
                if bucket.iter().any(|&k| Self::dominates(&arena[k as usize].state, &next)) {
                    continue;
                }
                if arena.len() >= max_states {
                    return Err(());
                }
                let id = arena.len();
                bucket.retain(|&k| {
                    let worse = Self::dominates(&next, &arena[k as usize].state);
                    if worse {
                        arena[k as usize].dead = true;
                    }
                    !worse
                });
                bucket.push(id as u32);
                arena.push(Entry { state: next, parent: idx as u32, action: Some(action), dead: false });
                if self.achieved(&next) {
                    if !exhaustive {
                        return Ok(Some((arena, id)));
                    }
                    let v = self.surplus(&next);
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, id));
                    }
                }
                queue.push(key(&next, id));
            }
        }
        Ok(best.map(|(_, id)| (arena, id)))
    }

    /// Turns the path to `end` into moves and transfers.
    fn schedule(&self, arena: &[Entry], end: usize) -> Schedule {
        let mut chain = Vec::new();
        let mut k = end;
        while arena[k].parent != ROOT {
            chain.push(k);
            k = arena[k].parent as usize;
        }
        chain.reverse();
        let g = &self.grid.unit;
        let amount = |q: i64| g * &Rational::from_int(q);
        let mut out = Schedule::new();
        // actual energies, replayed alongside
        let mut energy = self.grid.energies.clone();
        let mut pos = self.grid.starts.clone();
        let pool_at = |out: &mut Schedule, energy: &mut Vec<i64>, pos: &[u32], at: u32| {
            let here: Vec<usize> = (0..self.n).filter(|&j| pos[j] == at).collect();
            for &j in &here[1..] {
                out.give(j, here[0], amount(energy[j]));
                energy[here[0]] += energy[j];
                energy[j] = 0;
            }
        };
        let mut nodes = pos.clone();
        nodes.sort_unstable();
        nodes.dedup();
        for u in nodes {
            pool_at(&mut out, &mut energy, &pos, u);
        }
        for id in chain {
            let Action { agent, from, to, take, cost } = arena[id].action.expect("non-root");
            let (a, from, to, take, cost) = (agent as usize, from as u32, to as u32, take as i64, cost as i64);
            let holder = (0..self.n).find(|&j| pos[j] == from).expect("mover is here");
            if holder != a {
                out.give(holder, a, amount(take));
                energy[holder] -= take;
                energy[a] += take;
            }
            out.walk(a, self.grid.points[from as usize].clone(), self.grid.points[to as usize].clone());
            energy[a] -= cost;
            pos[a] = to;
            pool_at(&mut out, &mut energy, &pos, to);
        }
        out
    }
}

fn setup(inst: &Instance, task: &Task, g: &Rational) -> Result<(Grid, Goal), SolveError> {
    setup_at(inst, task, None, g)
}

fn setup_at(inst: &Instance, task: &Task, meet: Option<&Point>, g: &Rational) -> Result<(Grid, Goal), SolveError> {
    let n = match inst {
        Instance::Line(l) => l.n(),
        Instance::Tree(t) => t.agents.len(),
        Instance::Graph(x) => x.agents.len(),
    };
    if n == 0 || n > MAX_AGENTS {
        return Err(SolveError::TooLarge(format!("{n} agents")));
    }
    let (grid, st) = match inst {
        Instance::Line(l) => {
            let extra: Vec<&Rational> = match task {
                Task::Delivery { source, target } => {
                    let s = source.coord().ok_or_else(|| ModelError::BadPoint("expected a coordinate".into()))?;
                    let t = target.coord().ok_or_else(|| ModelError::BadPoint("expected a coordinate".into()))?;
                    vec![s, t]
                }
                _ => vec![],
            };
            let mut extra = extra;
            if let Some(p) = meet {
                extra.push(p.coord().ok_or_else(|| ModelError::BadPoint("expected a coordinate".into()))?);
            }
            let grid = Grid::line(l, &extra, g)?;
            let lo = l.positions().iter().chain(extra.iter().copied()).min().expect("non-empty").clone();
            let st = match task {
                Task::Delivery { source, target } => {
                    let f = |p: &Point| units(&(p.coord().expect("checked") - &lo), g, "endpoint").map(|k| k as u32);
                    Some((f(source)?, f(target)?))
                }
                _ => meet
                    .map(|p| units(&(p.coord().expect("checked") - &lo), g, "meeting point").map(|k| (k as u32, k as u32)))
                    .transpose()?,
            };
            (grid, st)
        }
        Instance::Tree(crate::model::TreeInstance { net, agents }) | Instance::Graph(crate::model::GraphInstance { net, agents }) => {
            let (grid, along) = Grid::network(net, agents, g)?;
            let st = match task {
                Task::Delivery { source, target } => {
                    Some((network_node(net, &along, g, source)?, network_node(net, &along, g, target)?))
                }
                _ => meet.map(|p| network_node(net, &along, g, p).map(|k| (k, k))).transpose()?,
            };
            (grid, st)
        }
    };
    if grid.adj.len() > u16::MAX as usize {
        return Err(SolveError::TooLarge(format!("{} grid points", grid.adj.len())));
    }
    if grid.energies.iter().sum::<i64>() > i32::MAX as i64 / 2 {
        return Err(SolveError::TooLarge("energy in grid units".into()));
    }
    let goal = match (task, st) {
        (Task::Delivery { .. }, Some((s, t))) => Goal::Delivery { s, t },
        (Task::Convergecast, Some((at, _))) => Goal::ConvergecastAt { at },
        (Task::Convergecast, None) => Goal::Convergecast,
        (Task::Broadcast { source: Some(s) }, _) if *s < n => Goal::Broadcast { source: *s },
        (Task::Broadcast { .. }, _) => return Err(SolveError::NotASource(usize::MAX)),
        _ => unreachable!("delivery endpoints resolved above"),
    };
    Ok((grid, goal))
}

/// Looks for any schedule achieving `task` on the grid.
pub fn search_feasible(inst: &Instance, task: &Task, cfg: &SearchConfig) -> Result<SearchOutcome, SolveError> {
    let (grid, goal) = setup(inst, task, &cfg.resolution)?;
    let search = Search::new(&grid, goal);
    Ok(match search.run(cfg.max_states, false) {
        Err(()) => SearchOutcome::Exhausted,
        Ok(None) => SearchOutcome::NotFound,
        Ok(Some((arena, end))) => SearchOutcome::Found(search.schedule(&arena, end)),
    })
}

/// Looks for a convergecast that completes at `meet`.
pub fn search_convergecast_at(inst: &Instance, meet: &Point, cfg: &SearchConfig) -> Result<SearchOutcome, SolveError> {
    let (grid, goal) = setup_at(inst, &Task::Convergecast, Some(meet), &cfg.resolution)?;
    let search = Search::new(&grid, goal);
    Ok(match search.run(cfg.max_states, false) {
        Err(()) => SearchOutcome::Exhausted,
        Ok(None) => SearchOutcome::NotFound,
        Ok(Some((arena, end))) => SearchOutcome::Found(search.schedule(&arena, end)),
    })
}

/// Best surplus over all grid schedules achieving `task`: energy at the
/// target for delivery, total remaining energy otherwise.
pub fn max_surplus(inst: &Instance, task: &Task, cfg: &SearchConfig) -> Result<SurplusOutcome, SolveError> {
    let (grid, goal) = setup(inst, task, &cfg.resolution)?;
    let search = Search::new(&grid, goal);
    Ok(match search.run(cfg.max_states, true) {
        Err(()) => SurplusOutcome::Exhausted,
        Ok(None) => SurplusOutcome::NotFound,
        Ok(Some((arena, end))) => SurplusOutcome::Best {
            surplus: &grid.unit * &Rational::from_int(search.surplus(&arena[end].state)),
            schedule: search.schedule(&arena, end),
        },
    })
}

/// Agents from which the oracle finds a broadcast.
pub fn oracle_broadcast_set(inst: &Instance, cfg: &SearchConfig) -> Result<Vec<AgentId>, SolveError> {
    let n = match inst {
        Instance::Line(l) => l.n(),
        Instance::Tree(t) => t.agents.len(),
        Instance::Graph(x) => x.agents.len(),
    };
    let mut out = Vec::new();
    for s in 0..n {
        match search_feasible(inst, &Task::Broadcast { source: Some(s) }, cfg)? {
            SearchOutcome::Found(_) => out.push(s),
            SearchOutcome::NotFound => {}
            SearchOutcome::Exhausted => return Err(SolveError::TooLarge("oracle state budget".into())),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::validate_schedule;
    use crate::q;

    fn line(p: &[Rational], e: &[Rational]) -> Instance {
        Instance::Line(LineInstance::new(p.to_vec(), e.to_vec()).unwrap())
    }

    fn delivery(s: Rational, t: Rational) -> Task {
        Task::Delivery { source: s.into(), target: t.into() }
    }

    #[test]
    fn finds_simple_delivery() {
        let inst = line(&[q!(0), q!(2)], &[q!(2), q!(0)]);
        let task = delivery(q!(0), q!(2));
        let out = search_feasible(&inst, &task, &SearchConfig::default()).unwrap();
        let sch = out.found().expect("feasible");
        assert!(validate_schedule(&inst, &task, sch).passed());
    }

    #[test]
    fn no_delivery_with_deficit() {
        let inst = line(&[q!(0), q!(4)], &[q!(1), q!(5)]);
        let out = search_feasible(&inst, &delivery(q!(0), q!(4)), &SearchConfig::default()).unwrap();
        assert_eq!(out, SearchOutcome::NotFound);
    }

    #[test]
    fn exact_energy_surplus() {
        let inst = line(&[q!(0), q!(10)], &[q!(10), q!(0)]);
        let cfg = SearchConfig::with_resolution(q!(1));
        let out = max_surplus(&inst, &delivery(q!(0), q!(10)), &cfg).unwrap();
        assert_eq!(out.surplus(), Some(&q!(0)));
    }

    #[test]
    fn example1_scaled_surplus_coarse() {
        let p: Vec<Rational> = (0..5).map(|i| q!(i)).collect();
        let e = [q!(0), q!(12, 5), q!(1), q!(4), q!(0)];
        let inst = line(&p, &e);
        let task = delivery(q!(0), q!(4));
        let cfg = SearchConfig::with_resolution(q!(1, 5));
        let SurplusOutcome::Best { surplus, schedule } = max_surplus(&inst, &task, &cfg).unwrap() else {
            panic!("expected a schedule")
        };
        assert_eq!(surplus, q!(4, 5));
        let report = validate_schedule(&inst, &task, &schedule);
        assert!(report.passed());
        assert_eq!(report.surplus_at_target, q!(4, 5));
    }

    #[test]
    fn example1_scaled_surplus_fine() {
        let p: Vec<Rational> = (0..5).map(|i| q!(i)).collect();
        let e = [q!(0), q!(12, 5), q!(1), q!(4), q!(0)];
        let cfg = SearchConfig::with_resolution(q!(1, 10));
        let out = max_surplus(&line(&p, &e), &delivery(q!(0), q!(4)), &cfg).unwrap();
        assert_eq!(out.surplus(), Some(&q!(4, 5)));
    }

    #[test]
    fn convergecast_surplus() {
        let inst = line(&[q!(0), q!(5)], &[q!(7, 2), q!(7, 2)]);
        let out = max_surplus(&inst, &Task::Convergecast, &SearchConfig::default()).unwrap();
        assert_eq!(out.surplus(), Some(&q!(2)));
    }

    #[test]
    fn budget_is_reported() {
        let inst = line(&[q!(0), q!(4)], &[q!(4), q!(4)]);
        let cfg = SearchConfig { resolution: q!(1, 4), max_states: 5 };
        assert_eq!(max_surplus(&inst, &Task::Convergecast, &cfg).unwrap(), SurplusOutcome::Exhausted);
    }
}
