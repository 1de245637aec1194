//! Line solvers against the brute-force oracle on every tiny instance.
//!
//! Broadcast sets are only checked for soundness: the pairwise cut test can
//! reject sources that a search still finds.

mod common;

use agentcast::line::*;
use agentcast::oracle::*;
use agentcast::*;

#[test]
fn tiny_lines_agree_with_oracle() {
    let cfg = SearchConfig::default();
    let mut bad = Vec::new();
    let mut count = 0;
    let mut missed = 0;
    for inst in common::tiny_lines() {
        count += 1;
        let n = inst.n();
        let wrapped = Instance::Line(inst.clone());
        let (s, t) = (inst.position(0).clone(), inst.position(n - 1).clone());
        let task = Task::Delivery { source: s.clone().into(), target: t.clone().into() };
        let dec = delivery_decide(&inst, &s, &t);
        let orc = max_surplus(&wrapped, &task, &cfg).unwrap();
        if matches!(orc, SurplusOutcome::Exhausted)
            || dec.feasible != orc.surplus().is_some()
            || (dec.feasible && orc.surplus() != Some(&dec.surplus_or_deficit)) {
            bad.push(format!("delivery-decision {inst:?}: solver {:?} oracle {:?}", dec, orc.surplus()));
        }
        if dec.feasible {
            let (_, sch) = delivery_plan(&inst, &s, &t).unwrap();
            let r = validate_line(&inst, &task, &sch);
            if !r.passed() || r.surplus_at_target != dec.surplus_or_deficit {
                bad.push(format!("delivery-schedule {inst:?}: {r:?}"));
            }
        }
        let cc = convergecast_decide(&inst);
        let orc = search_feasible(&wrapped, &Task::Convergecast, &cfg).unwrap();
        if Some(cc.feasible) != common::verdict(&orc) {
            bad.push(format!("convergecast-decision {inst:?}: solver {:?} oracle {:?}", cc, common::verdict(&orc)));
        }
        if cc.feasible {
            match convergecast_schedule(&inst) {
                Ok(sch) if validate_line(&inst, &Task::Convergecast, &sch).passed() => {}
                other => bad.push(format!("convergecast-schedule {inst:?}: {other:?}")),
            }
        }
        let br: Vec<usize> = broadcast_set(&inst).into_iter().collect();
        let obr = oracle_broadcast_set(&wrapped, &cfg).unwrap();
        if !br.iter().all(|a| obr.contains(a)) {
            bad.push(format!("broadcast-decision {inst:?}: solver {br:?} oracle {obr:?}"));
        }
        missed += obr.len() - br.len();
        for &src in &br {
            let task = Task::Broadcast { source: Some(src) };
            if let Err(e) = broadcast_schedule(&inst, src, |s| validate_line(&inst, &task, s).passed()) {
                bad.push(format!("broadcast-schedule {inst:?} from {src}: {e}"));
            }
        }
    }
    println!("{count} instances; {missed} oracle-only broadcast sources");
    assert!(bad.is_empty(), "{} problems:\n{}", bad.len(), bad[..bad.len().min(20)].join("\n"));
}
