//! Optimal broadcast from a given source agent on a line.
//!
//! Agents left of the source form a relay chain toward the left: agent `i`
//! waits at `b_i` for the information and then carries it back to `b_{i-1}`.
//! `rB_LR(p, P)` is the waiting point of agent `p`, which is also the point the
//! source must reach to serve the whole left side. It grows with slope 1 in
//! `P` once every agent of the chain can be activated, i.e. for `P >= aB_LR(p)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{LineConfig, Location};
use crate::scalar::Scalar;
use crate::strategy::Strategy;

/// Activation power and anchored waiting point for every non-source agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActivationProfile {
    pub source: usize,
    /// `(aB_LR(p), rB_LR(p, aB_LR(p)))` for `p = 1..k-1`.
    pub lr: Vec<(Scalar, Scalar)>,
    /// `(aB_RL(p), rB_RL(p, aB_RL(p)))` for `p = k+1..n`, indexed by `p - k - 1`.
    pub rl: Vec<(Scalar, Scalar)>,
}

impl ActivationProfile {
    pub fn ab_lr(&self, p: usize) -> &Scalar {
        &self.lr[p - 1].0
    }

    pub fn ab_rl(&self, p: usize) -> &Scalar {
        &self.rl[p - self.source - 1].0
    }

    /// `rB_LR(p, P)` for `P >= aB_LR(p)`.
    pub fn rb_lr(&self, p: usize, power: &Scalar) -> Scalar {
        let (a, r) = &self.lr[p - 1];
        assert!(power >= a, "power below activation");
        r + &(power - a)
    }

    /// `rB_RL(p, P)` for `P >= aB_RL(p)`.
    pub fn rb_rl(&self, p: usize, power: &Scalar) -> Scalar {
        let (a, r) = &self.rl[p - self.source - 1];
        assert!(power >= a, "power below activation");
        r - &(power - a)
    }
}

/// Sweep over an oriented chain; `xs[0]` is the far end, the source lies beyond `xs[last]`.
fn sweep(xs: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    let mut out: Vec<(Scalar, Scalar)> = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        if i == 0 {
            out.push((Scalar::zero(), x.clone()));
            continue;
        }
        let (a, r) = out[i - 1].clone();
        if (x - &a) <= r {
            out.push((a.clone(), (x + &a + &r).half()));
        } else {
            let delta = (x - &a - &r).half();
            out.push((a + delta, x.clone()));
        }
    }
    out
}

pub fn activation_profiles(c: &LineConfig, k: usize) -> ActivationProfile {
    let n = c.n();
    assert!(1 <= k && k <= n, "source out of range");
    let lr = sweep(&c.positions()[..k - 1]);
    let mirrored: Vec<Scalar> = c.positions()[k..].iter().rev().map(|x| -x).collect();
    let mut rl: Vec<(Scalar, Scalar)> = sweep(&mirrored).into_iter().map(|(a, r)| (a, -r)).collect();
    rl.reverse();
    ActivationProfile { source: k, lr, rl }
}

/// Waiting points of the left chain at power `P`, or `None` if some agent is never activated.
fn chain_lr(c: &LineConfig, k: usize, power: &Scalar) -> Option<Vec<Scalar>> {
    let mut b: Vec<Scalar> = Vec::with_capacity(k.saturating_sub(1));
    for i in 1..k {
        if i == 1 {
            b.push(c.pos(1) + power);
        } else {
            let prev = &b[i - 2];
            if &(prev + power) < c.pos(i) {
                return None;
            }
            b.push((prev + c.pos(i) + power).half());
        }
    }
    Some(b)
}

/// Waiting points of the right chain at power `P`, indexed by `p - k - 1`.
fn chain_rl(c: &LineConfig, k: usize, power: &Scalar) -> Option<Vec<Scalar>> {
    let n = c.n();
    let mut b: Vec<Scalar> = vec![Scalar::zero(); n - k];
    for i in (k + 1..=n).rev() {
        b[i - k - 1] = if i == n {
            c.pos(n) - power
        } else {
            let next = &b[i - k];
            if &(next - power) > c.pos(i) {
                return None;
            }
            (next + c.pos(i) - power).half()
        };
    }
    Some(b)
}

/// Order in which the source visits its two meeting points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Turn {
    FirstLeft,
    FirstRight,
}

/// Meeting points of the source with both chains and the cheaper visiting order.
struct SourceTour {
    left: Scalar,
    right: Scalar,
    turn: Turn,
    cost: Scalar,
}

fn source_tour(home: &Scalar, x: Option<&Scalar>, y: Option<&Scalar>) -> SourceTour {
    let left = x.map_or(home.clone(), |x| Scalar::min_of(x, home));
    let right = y.map_or(home.clone(), |y| Scalar::max_of(y, home));
    let a = home - &left;
    let b = &right - home;
    let span = &right - &left;
    let (turn, first) = if a <= b { (Turn::FirstLeft, a) } else { (Turn::FirstRight, b) };
    SourceTour { left, right, turn, cost: first + span }
}

/// Whether broadcast from agent `k` is possible with power `P`.
pub fn decide_broadcast(c: &LineConfig, k: usize, power: &Scalar) -> bool {
    let (Some(lr), Some(rl)) = (chain_lr(c, k, power), chain_rl(c, k, power)) else {
        return false;
    };
    &source_tour(c.pos(k), lr.last(), rl.first()).cost <= power
}

/// A regular broadcast plan. Arrays are indexed by `agent - 1`; for the source,
/// `b` and `f` are its first and second meeting points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularBcastPlan {
    pub power: Scalar,
    pub source: usize,
    pub b: Vec<Scalar>,
    pub f: Vec<Scalar>,
    pub turn: Turn,
}

impl RegularBcastPlan {
    /// Points where the source meets its left and right neighbours.
    pub fn meeting_points(&self, c: &LineConfig) -> (Scalar, Scalar) {
        let k = self.source;
        let home = c.pos(k);
        let left = if k > 1 { Scalar::min_of(&self.b[k - 2], home) } else { home.clone() };
        let right = if k < c.n() { Scalar::max_of(&self.b[k], home) } else { home.clone() };
        (left, right)
    }

    /// Checks the defining relations of a regular broadcast plan against `c`.
    ///
    /// The source condition uses meeting points clamped to the source position,
    /// which coincides with `{b_k, f_k} = {b_{k-1}, b_{k+1}}` when both
    /// neighbours wait on the far side of the source.
    pub fn check(&self, c: &LineConfig) -> Result<()> {
        let n = c.n();
        let k = self.source;
        let p = &self.power;
        if self.b.len() != n || self.f.len() != n || k == 0 || k > n {
            return Err(Error::Invalid("plan does not match the instance".into()));
        }
        let bad = |i: usize, what: &str| Err(Error::Invalid(format!("agent {i}: {what}")));
        for i in 1..k {
            let (b, f) = (&self.b[i - 1], &self.f[i - 1]);
            if i == 1 {
                if *b != c.pos(1) + p || f != b {
                    return bad(1, "end of chain must wait at Pos[1] + P");
                }
            } else if *f != self.b[i - 2] || *b != (f + c.pos(i) + p).half() {
                return bad(i, "left relay relation violated");
            }
            if b < c.pos(i) {
                return bad(i, "never activated");
            }
        }
        for i in k + 1..=n {
            let (b, f) = (&self.b[i - 1], &self.f[i - 1]);
            if i == n {
                if *b != c.pos(n) - p || f != b {
                    return bad(n, "end of chain must wait at Pos[n] - P");
                }
            } else if *f != self.b[i] || *b != (f + c.pos(i) - p).half() {
                return bad(i, "right relay relation violated");
            }
            if b > c.pos(i) {
                return bad(i, "never activated");
            }
        }
        let (left, right) = self.meeting_points(c);
        let (first, second) = match self.turn {
            Turn::FirstLeft => (left, right),
            Turn::FirstRight => (right, left),
        };
        if self.b[k - 1] != first || self.f[k - 1] != second {
            return bad(k, "source does not visit both meeting points");
        }
        let cost = (&first - c.pos(k)).abs() + (&second - &first).abs();
        if &cost > p {
            return bad(k, "source tour exceeds the power budget");
        }
        Ok(())
    }
}

/// Builds the regular plan for source `k` at power `P`, if feasible.
pub fn regular_bcast_plan(c: &LineConfig, k: usize, power: &Scalar) -> Result<RegularBcastPlan> {
    let n = c.n();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("source {k} out of range")));
    }
    let lr = chain_lr(c, k, power).ok_or_else(|| Error::Infeasible("left chain not activated".into()))?;
    let rl = chain_rl(c, k, power).ok_or_else(|| Error::Infeasible("right chain not activated".into()))?;
    let tour = source_tour(c.pos(k), lr.last(), rl.first());
    if &tour.cost > power {
        return Err(Error::Infeasible(format!("source cannot serve both sides with power {power}")));
    }
    let mut b = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for i in 1..k {
        b.push(lr[i - 1].clone());
        f.push(if i == 1 { lr[0].clone() } else { lr[i - 2].clone() });
    }
    let (first, second) = match tour.turn {
        Turn::FirstLeft => (tour.left, tour.right),
        Turn::FirstRight => (tour.right, tour.left),
    };
    b.push(first);
    f.push(second);
    for i in k + 1..=n {
        b.push(rl[i - k - 1].clone());
        f.push(if i == n { rl[n - k - 1].clone() } else { rl[i - k].clone() });
    }
    Ok(RegularBcastPlan { power: power.clone(), source: k, b, f, turn: tour.turn })
}

/// Optimal broadcast power from source `k` together with a plan achieving it.
///
/// Above `Q = max(aB_LR(k-1), aB_RL(k+1))` both waiting points move toward
/// the source with slope 1, so the excess `cost(P) - P` is a decreasing
/// piecewise-linear function of `u = P - Q` whose breakpoints are the two
/// values of `u` at which a waiting point crosses the source position.
pub fn compute_optimal_broadcast(c: &LineConfig, k: usize) -> (Scalar, RegularBcastPlan) {
    let n = c.n();
    assert!(1 <= k && k <= n, "source out of range");
    let prof = activation_profiles(c, k);
    let home = c.pos(k);
    let zero = Scalar::zero();
    let q = Scalar::max_of(
        if k > 1 { prof.ab_lr(k - 1) } else { &zero },
        if k < n { prof.ab_rl(k + 1) } else { &zero },
    );
    let x_q = (k > 1).then(|| prof.rb_lr(k - 1, &q));
    let y_q = (k < n).then(|| prof.rb_rl(k + 1, &q));
    let excess = |u: &Scalar| {
        let x = x_q.as_ref().map(|x| x + u);
        let y = y_q.as_ref().map(|y| y - u);
        source_tour(home, x.as_ref(), y.as_ref()).cost - &q - u
    };
    let mut marks = vec![zero.clone()];
    if let Some(x) = &x_q {
        marks.push(home - x);
    }
    if let Some(y) = &y_q {
        marks.push(y - home);
    }
    marks.retain(|m| !m.is_negative());
    marks.sort();
    marks.dedup();
    let mut u = None;
    for (i, s) in marks.iter().enumerate() {
        let gs = excess(s);
        if !gs.is_positive() {
            u = Some(s.clone());
            break;
        }
        let e = marks.get(i + 1).cloned().unwrap_or_else(|| s + &Scalar::one());
        let ge = excess(&e);
        if i + 1 == marks.len() || !ge.is_positive() {
            let slope = (&ge - &gs) / (&e - s);
            u = Some(s - &(&gs / &slope));
            break;
        }
    }
    let power = q + u.expect("excess decreases without bound");
    let plan = regular_bcast_plan(c, k, &power).expect("optimal power admits a regular plan");
    (power, plan)
}

/// Interval `[lo, hi]` of width at most `tol` with `decide(lo)` false and `decide(hi)` true.
pub fn bisection_oracle_broadcast(c: &LineConfig, k: usize, tol: &Scalar) -> (Scalar, Scalar) {
    assert!(tol.is_positive(), "tolerance must be positive");
    if decide_broadcast(c, k, &Scalar::zero()) {
        return (Scalar::zero(), Scalar::zero());
    }
    let mut lo = Scalar::zero();
    let mut hi = Scalar::one();
    while !decide_broadcast(c, k, &hi) {
        lo = hi.clone();
        hi = hi.twice();
    }
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi).half();
        if decide_broadcast(c, k, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Timed moves realising a regular broadcast plan.
///
/// Every agent walks to its waiting point at time 0. The source visits its
/// two meeting points in the planned order, waiting for each neighbour, and
/// every relay leaves for the next waiting point as soon as it is informed.
pub fn emit_broadcast_strategy(c: &LineConfig, plan: &RegularBcastPlan) -> Result<Strategy> {
    plan.check(c)?;
    let n = c.n();
    let k = plan.source;
    let home = c.pos(k);
    let (left, right) = plan.meeting_points(c);
    // where each chain agent waits, clamped for the source's neighbours
    let mut wait: Vec<Scalar> = plan.b.clone();
    if k > 1 {
        wait[k - 2] = left.clone();
    }
    if k < n {
        wait[k] = right.clone();
    }
    let arrive = |i: usize| (&wait[i - 1] - c.pos(i)).abs();
    let zero = Scalar::zero();
    let left_arrival = if k > 1 { arrive(k - 1) } else { zero.clone() };
    let right_arrival = if k < n { arrive(k + 1) } else { zero.clone() };
    let (t_left, t_right) = match plan.turn {
        Turn::FirstLeft => {
            let tl = Scalar::max_of(&(home - &left), &left_arrival);
            let tr = Scalar::max_of(&(&tl + &(&right - &left)), &right_arrival);
            (tl, tr)
        }
        Turn::FirstRight => {
            let tr = Scalar::max_of(&(&right - home), &right_arrival);
            let tl = Scalar::max_of(&(&tr + &(&right - &left)), &left_arrival);
            (tl, tr)
        }
    };
    let mut informed = vec![zero.clone(); n];
    if k > 1 {
        informed[k - 2] = t_left.clone();
        for i in (1..k - 1).rev() {
            let carrier = &informed[i] + &(&wait[i] - &wait[i - 1]).abs();
            informed[i - 1] = Scalar::max_of(&carrier, &arrive(i));
        }
    }
    if k < n {
        informed[k] = t_right.clone();
        for i in k + 2..=n {
            let carrier = &informed[i - 2] + &(&wait[i - 2] - &wait[i - 1]).abs();
            informed[i - 1] = Scalar::max_of(&carrier, &arrive(i));
        }
    }
    let mut s = Strategy::new();
    let pt = |x: &Scalar| Location::Point(x.clone());
    for i in 1..=n {
        if i == k {
            let (first, second, t_first) = match plan.turn {
                Turn::FirstLeft => (&left, &right, &t_left),
                Turn::FirstRight => (&right, &left, &t_right),
            };
            if first != home {
                s.push(k, zero.clone(), pt(home), pt(first));
            }
            if second != first {
                s.push(k, t_first.clone(), pt(first), pt(second));
            }
            continue;
        }
        let w = &wait[i - 1];
        if w != c.pos(i) {
            s.push(i, zero.clone(), pt(c.pos(i)), pt(w));
        }
        let chain_end = i == 1 || i == n;
        if &plan.f[i - 1] != w && !chain_end {
            s.push(i, informed[i - 1].clone(), pt(w), pt(&plan.f[i - 1]));
        }
    }
    Ok(s)
}
