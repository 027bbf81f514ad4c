mod common;

use std::collections::BTreeSet;

use common::line_strategy;
use powercast::model::Location;
use powercast::{simulate, LineConfig, Network, Scalar, Strategy, Trace};
use proptest::prelude::*;

/// Every agent makes up to two moves to the given points at the given delays.
fn build(c: &LineConfig, plan: &[(i64, i64, i64, i64)]) -> Strategy {
    let mut s = Strategy::new();
    for (i, &(d1, x1, d2, x2)) in plan.iter().enumerate().take(c.n()) {
        let id = i + 1;
        let start = c.pos(id).clone();
        let a = &start + &Scalar::ratio(x1, 2);
        let t1 = Scalar::ratio(d1, 2);
        let t2 = &t1 + &(&a - &start).abs() + Scalar::ratio(d2, 2);
        let b = &a + &Scalar::ratio(x2, 2);
        s.push(id, t1, Location::Point(start), Location::Point(a.clone()));
        s.push(id, t2, Location::Point(a), Location::Point(b));
    }
    s
}

/// Information sets recomputed from the meeting list alone.
fn closure(tr: &Trace) -> Vec<BTreeSet<usize>> {
    let n = tr.agent_count();
    let mut info: Vec<BTreeSet<usize>> = (1..=n).map(|i| BTreeSet::from([i])).collect();
    let mut times: Vec<&Scalar> = tr.meetings.iter().map(|m| &m.time).collect();
    times.sort();
    times.dedup();
    for t in times {
        loop {
            let mut changed = false;
            for m in tr.meetings.iter().filter(|m| &m.time == t) {
                let union: BTreeSet<usize> = m.agents.iter().flat_map(|&a| info[a - 1].clone()).collect();
                for &a in &m.agents {
                    if info[a - 1] != union {
                        info[a - 1] = union.clone();
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    info
}

fn plan_strategy() -> impl proptest::strategy::Strategy<Value = Vec<(i64, i64, i64, i64)>> {
    prop::collection::vec((0i64..20, -40i64..40, 0i64..20, -40i64..40), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn information_matches_meeting_closure(c in line_strategy(1, 8), plan in plan_strategy()) {
        let s = build(&c, &plan);
        let tr = simulate(Network::Line(&c), &s, &Scalar::from_int(1000)).unwrap();
        prop_assert_eq!(closure(&tr), tr.info.clone());
        for m in &tr.meetings {
            let set: BTreeSet<usize> = m.agents.iter().copied().collect();
            prop_assert_eq!(set.len(), m.agents.len());
            prop_assert!(m.agents.len() >= 2);
        }
    }

    #[test]
    fn simulation_is_deterministic(c in line_strategy(1, 8), plan in plan_strategy()) {
        let s = build(&c, &plan);
        let budget = Scalar::from_int(1000);
        prop_assert_eq!(
            simulate(Network::Line(&c), &s, &budget).unwrap(),
            simulate(Network::Line(&c), &s, &budget).unwrap()
        );
    }

    #[test]
    fn power_is_path_length(c in line_strategy(1, 8), plan in plan_strategy()) {
        let s = build(&c, &plan);
        let tr = simulate(Network::Line(&c), &s, &Scalar::from_int(1000)).unwrap();
        for (i, &(_, x1, _, x2)) in plan.iter().enumerate().take(c.n()) {
            let len = Scalar::ratio(x1.abs() + x2.abs(), 2);
            prop_assert_eq!(&tr.power[i], &len);
            if len.is_positive() {
                let below = &len - &Scalar::ratio(1, 1_000_000_000);
                prop_assert!(simulate(Network::Line(&c), &s, &below).is_err());
            }
        }
    }
}
