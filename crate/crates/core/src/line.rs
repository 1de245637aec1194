//! Linear-time algorithms for agents on a line.
//!
//! Agents are indexed from 0 in order of position. All tables are indexed the
//! same way.
//!
//! * `fwd[i]` is the delivery potential at agent `i` for a packet that starts
//!   at agent 0: the surplus left at `a_i` when non-negative, otherwise minus
//!   the energy that would have to be added at `a_i`.
//! * `bwd[i]` is the same quantity for a packet starting at the last agent.
//! * `dc[i]` concerns carrying a packet from `a_i` back to agent 0 with agents
//!   `0..=i`; `db` is its mirror image.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dyadic::{self, Dyadic};
use crate::error::SolveError;
use crate::model::{gather_at, normalize_delivery, AgentId, LineInstance, Point, Schedule, Task};
use crate::rational::Rational;

/// Potential after carrying `delta` across a gap of length `d`: the three
/// cases of the delivery recursion, without the receiving agent's own energy.
pub fn potential_step(delta: &Rational, d: &Rational) -> Rational {
    if delta >= d {
        delta - d
    } else if delta.is_nonneg() {
        (delta - d).double()
    } else {
        delta - &d.double()
    }
}

pub fn forward_potentials(inst: &LineInstance) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(inst.n());
    out.push(inst.energy(0).clone());
    for i in 1..inst.n() {
        let d = inst.position(i) - inst.position(i - 1);
        let v = inst.energy(i) + &potential_step(&out[i - 1], &d);
        out.push(v);
    }
    out
}

pub fn backward_potentials(inst: &LineInstance) -> Vec<Rational> {
    let mut v = forward_potentials(&inst.mirror());
    v.reverse();
    v
}

/// The `dc` scan: how much energy agent `i` could give up while agents
/// `0..=i` still bring a packet from `a_i` to `a_0` (negative: a deficit).
pub fn broadcast_potentials(inst: &LineInstance) -> Vec<Rational> {
    let mut s = inst.position(0).clone();
    let mut e = Rational::zero();
    let mut out = Vec::with_capacity(inst.n());
    for i in 0..inst.n() {
        let a = inst.position(i);
        let ei = inst.energy(i);
        if a > &(ei + &e + &s) {
            e += ei;
            out.push(&s + &e - a);
        } else {
            let reach = (a - &s).max(Rational::zero());
            s += (&e + ei + reach).half();
            e = Rational::zero();
            out.push((&s - a).double());
        }
    }
    out
}

/// The `dc` scan over integer inputs, in linear time.
fn broadcast_scan(pos: &[i128], energy: &[i128]) -> Vec<Dyadic> {
    let mut s = Dyadic::int(pos[0]);
    let mut e: i128 = 0;
    let mut out = Vec::with_capacity(pos.len());
    for (&a, &ei) in pos.iter().zip(energy) {
        if s.cmp_int(a - ei - e) == Ordering::Less {
            e += ei;
            out.push(s.add_int(e - a));
        } else {
            s = if s.cmp_int(a) == Ordering::Greater {
                s.add_half_int(e + ei)
            } else {
                s.add_int(a + e + ei).half()
            };
            e = 0;
            out.push(s.add_int(-a).double());
        }
    }
    out
}

/// Signs of [`broadcast_cuts`] without building the exact values, whose
/// denominators grow with `n`. `None` when the inputs do not scale to
/// machine integers.
fn broadcast_cut_signs(inst: &LineInstance) -> Option<Vec<bool>> {
    let (v, _) = dyadic::scale_to_ints(&[inst.positions(), inst.energies()])?;
    let (pos, energy) = (&v[0], &v[1]);
    let dc = broadcast_scan(pos, energy);
    let mirrored: Vec<i128> = pos.iter().rev().map(|x| -x).collect();
    let rev_energy: Vec<i128> = energy.iter().rev().copied().collect();
    let mut db = broadcast_scan(&mirrored, &rev_energy);
    db.reverse();
    Some((0..pos.len() - 1).map(|i| dc[i].sum_nonneg(&db[i + 1], -2 * (pos[i + 1] - pos[i]))).collect())
}

pub fn broadcast_potentials_mirror(inst: &LineInstance) -> Vec<Rational> {
    let mut v = broadcast_potentials(&inst.mirror());
    v.reverse();
    v
}

/// All four tables, as exported by `--emit-tables`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinePotentials {
    pub fwd: Vec<Rational>,
    pub bwd: Vec<Rational>,
    pub dc: Vec<Rational>,
    pub db: Vec<Rational>,
}

pub fn potentials(inst: &LineInstance) -> LinePotentials {
    LinePotentials {
        fwd: forward_potentials(inst),
        bwd: backward_potentials(inst),
        dc: broadcast_potentials(inst),
        db: broadcast_potentials_mirror(inst),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeliveryDecision {
    pub feasible: bool,
    /// Surplus at the target when feasible, otherwise minus the deficit.
    pub surplus_or_deficit: Rational,
}

pub fn delivery_decide(inst: &LineInstance, s: &Rational, t: &Rational) -> DeliveryDecision {
    let value = if s == t {
        gather_at(inst, s).0
    } else {
        let nd = normalize_delivery(inst, s, t);
        forward_potentials(&nd.instance).pop().expect("non-empty")
    };
    DeliveryDecision { feasible: value.is_nonneg(), surplus_or_deficit: value }
}

/// Parked agents by position, so carriers can find whom they pass.
struct Occupancy {
    at: BTreeMap<Rational, BTreeSet<AgentId>>,
}

impl Occupancy {
    fn new(positions: &[Rational]) -> Self {
        let mut at: BTreeMap<Rational, BTreeSet<AgentId>> = BTreeMap::new();
        for (i, x) in positions.iter().enumerate() {
            at.entry(x.clone()).or_default().insert(i);
        }
        Self { at }
    }

    fn remove(&mut self, x: &Rational, a: AgentId) {
        if let Some(set) = self.at.get_mut(x) {
            set.remove(&a);
            if set.is_empty() {
                self.at.remove(x);
            }
        }
    }

    fn insert(&mut self, x: Rational, a: AgentId) {
        self.at.entry(x).or_default().insert(a);
    }

    /// Agents in `[lo, hi]`, excluding `me`.
    fn within(&self, lo: &Rational, hi: &Rational, me: AgentId) -> Vec<(Rational, AgentId)> {
        self.at
            .range(lo.clone()..=hi.clone())
            .flat_map(|(x, set)| set.iter().filter(move |&&a| a != me).map(move |&a| (x.clone(), a)))
            .collect()
    }
}

/// Greedy delivery schedule for a normalized instance (packet at agent 0,
/// target at the last agent). Fails with `Infeasible` if `fwd` ends negative.
pub fn delivery_schedule(inst: &LineInstance) -> Result<Schedule, SolveError> {
    let fwd = forward_potentials(inst);
    let n = inst.n();
    if fwd[n - 1].is_negative() {
        return Err(SolveError::Infeasible);
    }
    let end = inst.position(n - 1).clone();
    let mut pos: Vec<Rational> = inst.positions().to_vec();
    let mut energy: Vec<Rational> = inst.energies().to_vec();
    let mut occ = Occupancy::new(&pos);
    let mut packet = inst.position(0).clone();
    let mut out = Schedule::new();

    let collect = |out: &mut Schedule, energy: &mut Vec<Rational>, me: AgentId, from: AgentId| {
        let amount = std::mem::take(&mut energy[from]);
        out.give(from, me, amount.clone());
        energy[me] += amount;
    };

    for i in 0..n {
        if packet == end {
            break;
        }
        if fwd[i].is_negative() || &packet > inst.position(i) {
            continue;
        }
        let mut here = pos[i].clone();
        occ.remove(&here, i);
        // walk left to the packet, emptying everyone passed
        let mut passed = occ.within(&packet, &here, i);
        passed.sort_by(|a, b| b.cmp(a));
        for (x, j) in passed {
            let d = &here - &x;
            if d > energy[i] {
                return Err(SolveError::Internal(format!("agent {i} cannot reach the packet")));
            }
            energy[i] -= &d;
            out.walk(i, Point::Coord(here.clone()), Point::Coord(x.clone()));
            here = x;
            collect(&mut out, &mut energy, i, j);
        }
        let d = &here - &packet;
        if d > energy[i] {
            return Err(SolveError::Internal(format!("agent {i} cannot reach the packet")));
        }
        energy[i] -= &d;
        out.walk(i, Point::Coord(here.clone()), Point::Coord(packet.clone()));
        here = packet.clone();
        // carry right, swallowing whoever is met
        let ahead: Vec<(Rational, AgentId)> = {
            let mut v = occ.within(&here, &end, i);
            v.retain(|(x, _)| x > &here);
            v
        };
        let mut stop = None;
        for (x, j) in ahead {
            if x != here {
                let d = &x - &here;
                if d > energy[i] {
                    stop = Some(&here + &energy[i]);
                    break;
                }
                energy[i] -= &d;
                out.walk(i, Point::Coord(here.clone()), Point::Coord(x.clone()));
                here = x;
            }
            collect(&mut out, &mut energy, i, j);
        }
        if let Some(x) = stop {
            energy[i] = Rational::zero();
            out.walk(i, Point::Coord(here.clone()), Point::Coord(x.clone()));
            here = x;
        } else if here != end {
            let d = &end - &here;
            if d > energy[i] {
                let x = &here + &energy[i];
                energy[i] = Rational::zero();
                out.walk(i, Point::Coord(here.clone()), Point::Coord(x.clone()));
                here = x;
            } else {
                energy[i] -= &d;
                out.walk(i, Point::Coord(here.clone()), Point::Coord(end.clone()));
                here = end.clone();
            }
        }
        packet = here.clone();
        pos[i] = here.clone();
        occ.insert(here, i);
    }
    if packet != end {
        return Err(SolveError::Internal("packet did not reach the target".into()));
    }
    Ok(out)
}

/// Delivery from `s` to `t` on an arbitrary instance: decision plus, when
/// feasible, a schedule in the instance's own coordinates and agent ids.
pub fn delivery_plan(inst: &LineInstance, s: &Rational, t: &Rational) -> Result<(Rational, Schedule), SolveError> {
    if s == t {
        return Ok(gather_at(inst, s));
    }
    let nd = normalize_delivery(inst, s, t);
    let value = forward_potentials(&nd.instance).pop().expect("non-empty");
    if value.is_negative() {
        return Err(SolveError::Infeasible);
    }
    let body = delivery_schedule(&nd.instance)?;
    Ok((value, nd.lift(&body)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergecastDecision {
    pub feasible: bool,
    /// First cut `i` (between agents `i` and `i + 1`) with non-negative value,
    /// and that value. A single agent reports cut 0.
    pub witness: Option<(usize, Rational)>,
}

/// Value of every cut; `None` where both sides are in deficit.
pub fn convergecast_cuts(inst: &LineInstance) -> Vec<Option<Rational>> {
    let fwd = forward_potentials(inst);
    let bwd = backward_potentials(inst);
    (0..inst.n().saturating_sub(1))
        .map(|i| {
            let d = inst.position(i + 1) - inst.position(i);
            let (p, q) = (&fwd[i], &bwd[i + 1]);
            match (p.is_nonneg(), q.is_nonneg()) {
                (true, true) => Some(p + q - &d),
                (true, false) => Some(p + &q.half() - &d),
                (false, true) => Some(&p.half() + q - &d),
                (false, false) => None,
            }
        })
        .collect()
}

pub fn convergecast_decide(inst: &LineInstance) -> ConvergecastDecision {
    if inst.n() == 1 {
        return ConvergecastDecision { feasible: true, witness: Some((0, inst.energy(0).clone())) };
    }
    let witness = convergecast_cuts(inst)
        .into_iter()
        .enumerate()
        .find_map(|(i, v)| v.filter(Rational::is_nonneg).map(|v| (i, v)));
    ConvergecastDecision { feasible: witness.is_some(), witness }
}

/// Renumbers a schedule of a sub-instance starting at agent `offset`.
fn shift(schedule: Schedule, offset: usize) -> Schedule {
    schedule.map(|a| Some(a + offset), Clone::clone).expect("no virtual agents")
}

/// One side of a two-sided plan: agents `range` carry a packet between `z`
/// and the far end of their range (`inward` selects the direction).
fn side_plan(inst: &LineInstance, range: std::ops::Range<usize>, z: &Rational, inward: bool) -> Option<Schedule> {
    if range.is_empty() {
        return Some(Schedule::new());
    }
    let offset = range.start;
    let sub = inst.slice(range);
    let far = if z <= sub.position(0) { sub.position(sub.n() - 1) } else { sub.position(0) };
    let far = if sub.n() == 1 { sub.position(0) } else { far };
    let (s, t) = if inward { (far, z) } else { (z, far) };
    if s == t && !inward {
        return Some(Schedule::new());
    }
    if s == t {
        // a lone agent already at the meeting point
        return (sub.n() == 1).then(Schedule::new);
    }
    delivery_plan(&sub, s, t).ok().map(|(_, sch)| shift(sch, offset))
}

/// Candidate meeting points between agents `i` and `i + 1`.
fn meeting_candidates(inst: &LineInstance, pot: &LinePotentials, i: usize) -> Vec<Rational> {
    let (a, b) = (inst.position(i), inst.position(i + 1));
    let clamp = |x: Rational| x.max(a.clone()).min(b.clone());
    let mut v = vec![
        a.clone(),
        clamp(a + &pot.fwd[i]),
        clamp(b - &pot.bwd[i + 1]),
        clamp(a + &pot.dc[i].half()),
        clamp(b - &pot.db[i + 1].half()),
        (a + b).half(),
    ];
    v.sort();
    v.dedup();
    v
}

/// A convergecast schedule: both halves deliver their information to a
/// meeting point. Fails with `Infeasible` when no meeting point works.
pub fn convergecast_schedule(inst: &LineInstance) -> Result<Schedule, SolveError> {
    let n = inst.n();
    if n == 1 {
        return Ok(Schedule::new());
    }
    let pot = potentials(inst);
    for i in 0..n - 1 {
        for z in meeting_candidates(inst, &pot, i) {
            let Some(left) = side_plan(inst, 0..i + 1, &z, true) else { continue };
            let Some(right) = side_plan(inst, i + 1..n, &z, true) else { continue };
            let mut out = left;
            out.extend(right);
            return Ok(out);
        }
    }
    Err(SolveError::Infeasible)
}

/// Value of the broadcast condition at every cut.
pub fn broadcast_cuts(inst: &LineInstance) -> Vec<Rational> {
    let dc = broadcast_potentials(inst);
    let db = broadcast_potentials_mirror(inst);
    (0..inst.n().saturating_sub(1))
        .map(|i| {
            let d = inst.position(i + 1) - inst.position(i);
            &dc[i] + &db[i + 1] - &d.double()
        })
        .collect()
}

/// Agents that pass the pairwise broadcast condition (both agents of every
/// cut whose value is non-negative). A single agent is always a source.
pub fn broadcast_set(inst: &LineInstance) -> BTreeSet<AgentId> {
    if inst.n() == 1 {
        return BTreeSet::from([0]);
    }
    let signs = broadcast_cut_signs(inst)
        .unwrap_or_else(|| broadcast_cuts(inst).iter().map(Rational::is_nonneg).collect());
    signs.iter().enumerate().filter(|(_, &ok)| ok).flat_map(|(i, _)| [i, i + 1]).collect()
}

/// Index of the first move that ends at `z`.
fn first_arrival(schedule: &Schedule, z: &Rational) -> Option<usize> {
    schedule.steps.iter().position(|s| match s {
        crate::model::Step::Move { path, .. } => path.last().and_then(Point::coord) == Some(z),
        _ => false,
    })
}

/// Appends to `head` a delivery from `s` to `t` planned on the agents as
/// `head` leaves them.
fn then_deliver(inst: &LineInstance, head: Schedule, s: &Rational, t: &Rational) -> Option<Schedule> {
    let report = crate::oracle::validate_line(inst, &Task::Convergecast, &head);
    if report.violation.is_some() {
        return None;
    }
    let agents: Vec<(Rational, Rational)> = report
        .positions
        .iter()
        .zip(&report.energies)
        .map(|(p, e)| p.coord().cloned().map(|x| (x, e.clone())))
        .collect::<Option<_>>()?;
    let (merged, merge) = LineInstance::from_agents(&agents).ok()?;
    let (_, tail) = delivery_plan(&merged, s, t).ok()?;
    let mut out = head;
    out.extend(merge.lift_with_energies(&tail, &report.energies).ok()?);
    Some(out)
}

/// Broadcast schedule from `source`. Each half carries the information
/// outward from a handoff point; the halves are interleaved so the first
/// arrival at the handoff point meets the other half. Every candidate is
/// replayed by `check` and only a passing one is returned.
pub fn broadcast_schedule(
    inst: &LineInstance,
    source: AgentId,
    check: impl Fn(&Schedule) -> bool,
) -> Result<Schedule, SolveError> {
    let n = inst.n();
    if source >= n {
        return Err(SolveError::NotASource(source));
    }
    if !broadcast_set(inst).contains(&source) {
        return Err(SolveError::NotASource(source));
    }
    if n == 1 {
        return Ok(Schedule::new());
    }
    let pot = potentials(inst);
    let cuts = broadcast_cuts(inst);
    let mut order: Vec<usize> = (0..n - 1).filter(|&i| cuts[i].is_nonneg()).collect();
    order.sort_by_key(|&i| (i != source && i + 1 != source, i));
    let mut all: Vec<usize> = (0..n - 1).collect();
    all.retain(|i| !order.contains(i));
    order.extend(all);
    for i in order {
        for z in meeting_candidates(inst, &pot, i) {
            let Some(left) = side_plan(inst, 0..i + 1, &z, false) else { continue };
            let Some(right) = side_plan(inst, i + 1..n, &z, false) else { continue };
            for (first, second) in [(&left, &right), (&right, &left)] {
                let cut = first_arrival(first, &z).map_or(0, |k| k + 1);
                let mut sch = Schedule { steps: first.steps[..cut].to_vec() };
                sch.steps.extend(second.steps.iter().cloned());
                sch.steps.extend(first.steps[cut..].iter().cloned());
                if check(&sch) {
                    return Ok(sch);
                }
            }
        }
    }
    // sweeps: bring the information to one end, then carry it to the other
    let src = inst.position(source);
    for (a, b, side) in [(0, n - 1, 0..source + 1), (n - 1, 0, source..n)] {
        let (a, b) = (inst.position(a), inst.position(b));
        if let Ok((_, sch)) = delivery_plan(inst, src, b) {
            if check(&sch) {
                return Ok(sch);
            }
        }
        let mut heads = vec![Schedule::new()];
        if src != a {
            let offset = side.start;
            if let Ok((_, sch)) = delivery_plan(&inst.slice(side), src, a) {
                heads.push(shift(sch, offset));
            }
            if let Ok((_, sch)) = delivery_plan(inst, src, a) {
                heads.push(sch);
            }
            heads.remove(0);
        }
        for head in heads {
            if let Some(sch) = then_deliver(inst, head, a, b) {
                if check(&sch) {
                    return Ok(sch);
                }
            }
        }
    }
    Err(SolveError::Internal(format!("no broadcast schedule found for source {source}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn example1() -> LineInstance {
        LineInstance::from_ints(&[0, 10, 20, 30, 40], &[0, 24, 10, 40, 0]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    fn exact_signs(inst: &LineInstance) -> Vec<bool> {
        broadcast_cuts(inst).iter().map(Rational::is_nonneg).collect()
    }

    #[test]
    fn fast_broadcast_scan_is_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..3000 {
            let n = rng.gen_range(1..12);
            let den = if round % 3 == 0 { rng.gen_range(1..7) } else { 1 };
            let mut x = Rational::zero();
            let (mut pos, mut en) = (Vec::new(), Vec::new());
            for _ in 0..n {
                x = &x + &Rational::new(rng.gen_range(1..6), den);
                pos.push(x.clone());
                en.push(Rational::new(rng.gen_range(0..12), den));
            }
            let inst = LineInstance::new(pos, en).unwrap();
            let (v, scale) = dyadic::scale_to_ints(&[inst.positions(), inst.energies()]).unwrap();
            let dc: Vec<Rational> = broadcast_scan(&v[0], &v[1]).iter().map(|d| d.to_rational(scale)).collect();
            assert_eq!(dc, broadcast_potentials(&inst), "{inst:?}");
            assert_eq!(broadcast_cut_signs(&inst).unwrap(), exact_signs(&inst), "{inst:?}");
        }
    }

    #[test]
    fn broadcast_set_handles_long_halving_chains() {
        // every step halves, so exact values carry about n bits
        let n = 200_000;
        let inst = LineInstance::from_ints(&(0..n).map(|i| 3 * i).collect::<Vec<_>>(), &vec![5; n as usize]).unwrap();
        let start = std::time::Instant::now();
        let set = broadcast_set(&inst);
        assert!(start.elapsed().as_secs() < 5);
        assert_eq!(set.len(), n as usize);
        let small = inst.slice(0..300);
        assert_eq!(broadcast_cut_signs(&small).unwrap(), exact_signs(&small));
    }

    #[test]
    fn step_cases() {
        assert_eq!(potential_step(&q!(5), &q!(3)), q!(2));
        assert_eq!(potential_step(&q!(1), &q!(3)), q!(-4));
        assert_eq!(potential_step(&q!(-1), &q!(3)), q!(-7));
    }

    #[test]
    fn example1_tables() {
        let p = potentials(&example1());
        assert_eq!(p.fwd, ints(&[0, 4, -2, 18, 8]));
        assert_eq!(p.bwd, ints(&[24, 34, 20, 20, 0]));
        assert_eq!(p.dc, vec![q!(0), q!(14), q!(7), q!(67, 2), q!(27, 2)]);
        assert_eq!(p.db, ints(&[4, 24, 20, 30, 0]));
    }

    #[test]
    fn single_agent() {
        let inst = LineInstance::from_ints(&[3], &[7]).unwrap();
        assert_eq!(forward_potentials(&inst), ints(&[7]));
        assert_eq!(convergecast_decide(&inst).witness, Some((0, q!(7))));
        assert_eq!(broadcast_set(&inst), BTreeSet::from([0]));
        assert!(delivery_schedule(&inst).unwrap().is_empty());
    }

    #[test]
    fn two_agent_deficit() {
        let inst = LineInstance::from_ints(&[0, 4], &[1, 5]).unwrap();
        assert_eq!(forward_potentials(&inst), ints(&[1, -1]));
        let d = delivery_decide(&inst, &q!(0), &q!(4));
        assert!(!d.feasible);
        assert_eq!(d.surplus_or_deficit, q!(-1));
        let topped = inst.with_energy(1, q!(6)).unwrap();
        assert_eq!(forward_potentials(&topped)[1], q!(0));
    }

    #[test]
    fn delivery_same_endpoint() {
        let inst = LineInstance::from_ints(&[0, 5], &[2, 3]).unwrap();
        let d = delivery_decide(&inst, &q!(5), &q!(5));
        assert!(d.feasible);
        assert_eq!(d.surplus_or_deficit, q!(3));
    }

    #[test]
    fn exact_energy_walk() {
        let inst = LineInstance::from_ints(&[0, 10], &[10, 0]).unwrap();
        let sch = delivery_schedule(&inst).unwrap();
        assert_eq!(sch.steps, vec![crate::model::Step::Move { agent: 0, path: vec![q!(0).into(), q!(10).into()] }]);
    }

    #[test]
    fn convergecast_examples() {
        let c = convergecast_decide(&LineInstance::from_ints(&[0, 10], &[7, 7]).unwrap());
        assert_eq!(c.witness, Some((0, q!(4))));
        let c = convergecast_decide(&LineInstance::from_ints(&[0, 10], &[4, 4]).unwrap());
        assert!(!c.feasible);
        assert_eq!(convergecast_cuts(&LineInstance::from_ints(&[0, 10], &[4, 4]).unwrap()), vec![Some(q!(-2))]);
        assert_eq!(convergecast_decide(&example1()).witness, Some((0, q!(24))));
    }

    #[test]
    fn broadcast_two_agents() {
        let inst = LineInstance::from_ints(&[0, 10], &[10, 10]).unwrap();
        assert_eq!(broadcast_potentials(&inst), vec![q!(10), q!(5)]);
        assert_eq!(broadcast_cuts(&inst), vec![q!(0)]);
        assert_eq!(broadcast_set(&inst), BTreeSet::from([0, 1]));
        assert!(broadcast_set(&LineInstance::from_ints(&[0, 10], &[4, 4]).unwrap()).is_empty());
    }

    #[test]
    fn example1_broadcast_cuts() {
        assert_eq!(broadcast_cuts(&example1()), vec![q!(4), q!(14), q!(17), q!(27, 2)]);
        assert_eq!(broadcast_set(&example1()).len(), 5);
    }
}
