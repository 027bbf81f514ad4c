use super::RegularConvPlan;
use crate::error::Result;
use crate::model::{LineConfig, Location};
use crate::scalar::Scalar;
use crate::strategy::Strategy;

/// Timed moves realising a regular convergecast plan.
///
/// Every agent walks to its pickup point `b_i` at time 0 and leaves for `f_i`
/// as soon as the carrier coming from its side has reached `b_i`.
pub fn emit_convergecast_strategy(c: &LineConfig, plan: &RegularConvPlan) -> Result<Strategy> {
    plan.check(c)?;
    let n = c.n();
    let mut depart = vec![Scalar::zero(); n];
    for i in 2..=plan.split {
        let carrier = &depart[i - 2] + &(&plan.b[i - 1] - &plan.b[i - 2]);
        depart[i - 1] = Scalar::max_of(&carrier, &(c.pos(i) - &plan.b[i - 1]));
    }
    for i in (plan.split + 1..n).rev() {
        let carrier = &depart[i] + &(&plan.b[i] - &plan.b[i - 1]);
        depart[i - 1] = Scalar::max_of(&carrier, &(&plan.b[i - 1] - c.pos(i)));
    }
    let mut s = Strategy::new();
    for i in 1..=n {
        let (pos, b, f) = (c.pos(i), &plan.b[i - 1], &plan.f[i - 1]);
        if pos != b {
            s.push(i, Scalar::zero(), Location::Point(pos.clone()), Location::Point(b.clone()));
        }
        if b != f {
            s.push(i, depart[i - 1].clone(), Location::Point(b.clone()), Location::Point(f.clone()));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_convergecast::{compute_optimal_convergecast, regular_conv_plan};
    use crate::scalar::sc;
    use crate::strategy::{simulate, verify_convergecast, Network};

    #[test]
    fn wavefront_timing() {
        let c = LineConfig::from_ints(&[0, 4, 8]).unwrap();
        let plan = regular_conv_plan(&c, 2, &sc("3")).unwrap();
        let s = emit_convergecast_strategy(&c, &plan).unwrap();
        let a2: Vec<_> = s.moves.iter().filter(|m| m.agent == 2).collect();
        assert_eq!(a2.len(), 2);
        assert_eq!(a2[1].depart, sc("3"));
        assert_eq!(a2[1].to, Location::Point(sc("5")));
        let tr = simulate(Network::Line(&c), &s, &sc("3")).unwrap();
        let w = verify_convergecast(&tr).unwrap();
        assert_eq!(w.time, sc("5"));
    }

    #[test]
    fn two_agents_meet_halfway() {
        let c = LineConfig::from_ints(&[0, 10]).unwrap();
        let o = compute_optimal_convergecast(&c);
        let s = emit_convergecast_strategy(&c, &o.plan).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.moves.iter().all(|m| m.depart == sc("0") && m.to == Location::Point(sc("5"))));
        let tr = simulate(Network::Line(&c), &s, &sc("5")).unwrap();
        assert_eq!(verify_convergecast(&tr).unwrap().time, sc("5"));
    }

    #[test]
    fn single_agent_is_empty() {
        let c = LineConfig::from_ints(&[7]).unwrap();
        let o = compute_optimal_convergecast(&c);
        assert!(emit_convergecast_strategy(&c, &o.plan).unwrap().is_empty());
    }
}
