//! Relaying a piece of information between two points of a line.
//!
//! In a forward carry every agent walks back to `b_i`, picks up the
//! information and then carries it forward to `f_i`, spending exactly `P`.
//! The pull plan is anchored at the target, the push plan at the source.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::LineConfig;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Information travels left to right.
    Forward,
    /// Information travels right to left.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarryPlan {
    pub direction: Direction,
    /// `b[i-1]` is the pickup point of agent `i`.
    pub b: Vec<Scalar>,
    /// `f[i-1]` is the drop point of agent `i`.
    pub f: Vec<Scalar>,
    pub power: Scalar,
}

fn check_inputs(c: &LineConfig, s: &Scalar, t: &Scalar, p: &Scalar, dir: Direction) -> Result<()> {
    if !p.is_positive() {
        return Err(Error::Precondition("power must be positive".into()));
    }
    let ordered = match dir {
        Direction::Forward => s <= t,
        Direction::Reverse => s >= t,
    };
    if !ordered {
        return Err(Error::Precondition(format!(
            "s={s} and t={t} are not ordered for a {dir:?} carry"
        )));
    }
    let (first, last) = match dir {
        Direction::Forward => (c.pos(1), c.pos(c.n())),
        Direction::Reverse => (c.pos(c.n()), c.pos(1)),
    };
    if &(s - first).abs() > p || &(t - last).abs() > p {
        return Err(Error::Precondition(format!(
            "end agents must be within distance {p} of s and t"
        )));
    }
    Ok(())
}

fn trivial(c: &LineConfig, s: &Scalar, p: &Scalar, dir: Direction) -> Result<CarryPlan> {
    if c.positions().iter().any(|x| &(x - s).abs() <= p) {
        Ok(CarryPlan {
            direction: dir,
            b: c.positions().to_vec(),
            f: c.positions().to_vec(),
            power: p.clone(),
        })
    } else {
        Err(Error::Infeasible(format!("no agent within distance {p} of {s}")))
    }
}

/// Applies a forward computation to the mirrored instance and maps the plan back.
fn mirrored(
    c: &LineConfig,
    s: &Scalar,
    t: &Scalar,
    p: &Scalar,
    forward: impl Fn(&LineConfig, &Scalar, &Scalar, &Scalar) -> Result<CarryPlan>,
) -> Result<CarryPlan> {
    let plan = forward(&c.reflect(), &-s, &-t, p)?;
    Ok(CarryPlan {
        direction: Direction::Reverse,
        b: plan.b.iter().rev().map(|x| -x).collect(),
        f: plan.f.iter().rev().map(|x| -x).collect(),
        power: plan.power,
    })
}

fn pull_chain(c: &LineConfig, t: &Scalar, p: &Scalar) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let n = c.n();
    let mut b = vec![Scalar::zero(); n];
    let mut f = vec![Scalar::zero(); n];
    let mut next = t.clone();
    for i in (1..=n).rev() {
        let fi = next;
        let bi = (&fi + c.pos(i) - p).half();
        if &bi > c.pos(i) {
            return Err(Error::Infeasible(format!(
                "agent {i} would have to pick up at {bi}, right of its position {}",
                c.pos(i)
            )));
        }
        if fi < bi {
            return Err(Error::Infeasible(format!(
                "agent {i} cannot cover [{bi}, {fi}]"
            )));
        }
        next = bi.clone();
        b[i - 1] = bi;
        f[i - 1] = fi;
    }
    Ok((b, f))
}

fn push_chain(c: &LineConfig, s: &Scalar, p: &Scalar) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let n = c.n();
    let mut b = Vec::with_capacity(n);
    let mut f: Vec<Scalar> = Vec::with_capacity(n);
    for i in 1..=n {
        let reach = if i == 1 { s } else { &f[i - 2] };
        let bi = Scalar::min_of(reach, c.pos(i));
        let fi = p + bi.twice() - c.pos(i);
        if fi < bi {
            return Err(Error::Infeasible(format!(
                "agent {i} cannot reach the information at {bi}"
            )));
        }
        b.push(bi);
        f.push(fi);
    }
    Ok((b, f))
}

fn pull_forward(c: &LineConfig, s: &Scalar, t: &Scalar, p: &Scalar) -> Result<CarryPlan> {
    if s == t {
        return trivial(c, s, p, Direction::Forward);
    }
    let (b, f) = pull_chain(c, t, p)?;
    if &b[0] > s {
        return Err(Error::Infeasible(format!(
            "first pickup point {} lies right of the source {s}",
            b[0]
        )));
    }
    Ok(CarryPlan { direction: Direction::Forward, b, f, power: p.clone() })
}

fn push_forward(c: &LineConfig, s: &Scalar, t: &Scalar, p: &Scalar) -> Result<CarryPlan> {
    if s == t {
        return trivial(c, s, p, Direction::Forward);
    }
    let (b, f) = push_chain(c, s, p)?;
    let last = f.last().expect("non-empty line");
    if last < t {
        return Err(Error::Infeasible(format!("push reaches only {last} < {t}")));
    }
    Ok(CarryPlan { direction: Direction::Forward, b, f, power: p.clone() })
}

/// Pull carry from `s` to `t`: the last agent drops exactly at `t`.
pub fn pull_carry(
    c: &LineConfig,
    s: &Scalar,
    t: &Scalar,
    p: &Scalar,
    dir: Direction,
) -> Result<CarryPlan> {
    check_inputs(c, s, t, p, dir)?;
    match dir {
        Direction::Forward => pull_forward(c, s, t, p),
        Direction::Reverse => mirrored(c, s, t, p, pull_forward),
    }
}

/// Push carry from `s` to `t`: the first agent picks up at `min(Pos[1], s)`.
pub fn push_carry(
    c: &LineConfig,
    s: &Scalar,
    t: &Scalar,
    p: &Scalar,
    dir: Direction,
) -> Result<CarryPlan> {
    check_inputs(c, s, t, p, dir)?;
    match dir {
        Direction::Forward => push_forward(c, s, t, p),
        Direction::Reverse => mirrored(c, s, t, p, push_forward),
    }
}

/// Smallest source (largest, for `Reverse`) from which `t` can be served.
pub fn min_feasible_source(c: &LineConfig, t: &Scalar, p: &Scalar, dir: Direction) -> Result<Scalar> {
    if !p.is_positive() {
        return Err(Error::Precondition("power must be positive".into()));
    }
    match dir {
        Direction::Forward => {
            if &(t - c.pos(c.n())).abs() > p {
                return Err(Error::Precondition(format!("last agent farther than {p} from {t}")));
            }
            Ok(pull_chain(c, t, p)?.0.swap_remove(0))
        }
        Direction::Reverse => Ok(-min_feasible_source(&c.reflect(), &-t, p, Direction::Forward)?),
    }
}

/// Farthest target reachable from `s`.
pub fn max_feasible_target(c: &LineConfig, s: &Scalar, p: &Scalar, dir: Direction) -> Result<Scalar> {
    if !p.is_positive() {
        return Err(Error::Precondition("power must be positive".into()));
    }
    match dir {
        Direction::Forward => {
            if &(s - c.pos(1)).abs() > p {
                return Err(Error::Precondition(format!("first agent farther than {p} from {s}")));
            }
            Ok(push_chain(c, s, p)?.1.pop().expect("non-empty line"))
        }
        Direction::Reverse => Ok(-max_feasible_target(&c.reflect(), &-s, p, Direction::Forward)?),
    }
}
