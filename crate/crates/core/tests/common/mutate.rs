//! Schedule mutation operators for checking that the validator rejects
//! broken schedules. Each operator picks its site from the replay of the
//! golden schedule so the mutant is invalid by construction; `None` means
//! the schedule has no such site.

use agentcast::oracle::{validate_line, ValidationReport};
use agentcast::{LineInstance, Point, Rational, Schedule, Step, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    LengthenMove,
    DeleteTransfer,
    ReorderSteps,
    NegateAmount,
    Teleport,
}

pub const ALL: [Op; 5] = [Op::LengthenMove, Op::DeleteTransfer, Op::ReorderSteps, Op::NegateAmount, Op::Teleport];

/// State after each prefix of the schedule: `trace[k]` follows `k` steps.
fn trace(inst: &LineInstance, task: &Task, golden: &Schedule) -> Vec<ValidationReport> {
    (0..=golden.len())
        .map(|k| validate_line(inst, task, &Schedule { steps: golden.steps[..k].to_vec() }))
        .collect()
}

fn coord(p: &Point) -> Rational {
    p.coord().cloned().expect("line schedules use coordinates")
}

pub fn mutate(inst: &LineInstance, task: &Task, golden: &Schedule, op: Op) -> Option<Schedule> {
    let steps = &golden.steps;
    let mut out = golden.clone();
    match op {
        Op::LengthenMove => {
            // a detour longer than all the energy there is
            let k = steps.iter().position(|s| matches!(s, Step::Move { .. }))?;
            let Step::Move { path, .. } = &mut out.steps[k] else { unreachable!() };
            let end = coord(path.last()?);
            let far = &end + &(&inst.total_energy() + &Rational::one());
            path.push(Point::Coord(far));
            path.push(Point::Coord(end));
        }
        Op::DeleteTransfer => {
            // a transfer the receiver later needs: its energy dips below the amount
            let tr = trace(inst, task, golden);
            let k = steps.iter().enumerate().position(|(k, s)| match s {
                Step::Transfer { to, amount, .. } if !amount.is_zero() => {
                    tr[k + 1..].iter().any(|r| &r.energies[*to] < amount)
                }
                _ => false,
            })?;
            out.steps.remove(k);
        }
        Op::ReorderSteps => {
            // hoist a transfer above the move that brought the two agents together
            let tr = trace(inst, task, golden);
            let (k, j) = steps.iter().enumerate().find_map(|(k, s)| {
                let Step::Transfer { from, to, .. } = s else { return None };
                let j = (0..k).rev().find(|&j| match &steps[j] {
                    Step::Move { agent, .. } => {
                        (agent == from || agent == to) && tr[j].positions[*agent] != tr[j + 1].positions[*agent]
                    }
                    _ => false,
                })?;
                (tr[j].positions[*from] != tr[j].positions[*to]).then_some((k, j))
            })?;
            let t = out.steps.remove(k);
            out.steps.insert(j, t);
        }
        Op::NegateAmount => {
            let k = steps.iter().position(|s| matches!(s, Step::Transfer { amount, .. } if !amount.is_zero()))?;
            let Step::Transfer { amount, .. } = &mut out.steps[k] else { unreachable!() };
            *amount = -amount.clone();
        }
        Op::Teleport => {
            let k = steps.iter().position(|s| matches!(s, Step::Move { .. }))?;
            let Step::Move { path, .. } = &mut out.steps[k] else { unreachable!() };
            path[0] = Point::Coord(&coord(&path[0]) + &Rational::one());
        }
    }
    Some(out)
}
