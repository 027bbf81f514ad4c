//! Optimal convergecast on a line.
//!
//! Indices are 1-based. `ReachLR(q, P)` is the rightmost point to which
//! agents `1..=q` can bring their joint information with power `P` each;
//! `ReachRL` is its mirror image. Both are increasing (resp. decreasing)
//! piecewise-linear functions of `P` whose pieces are delimited by the
//! thresholds `TH(p)`, the least power at which agent `p` no longer has to
//! walk backwards to pick up the information.

mod emit;
mod oracle;

pub use emit::emit_convergecast_strategy;
pub use oracle::{quadratic_oracle_convergecast, PiecewiseLinear};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::LineConfig;
use crate::scalar::Scalar;

/// Weighted prefix sums `S(1, i) = 2 S(1, i-1) + Pos[i]` (with `S(1,1) = 0`)
/// stored as exact integers after scaling all positions by a common denominator.
#[derive(Clone, Debug)]
pub struct PrefixSums {
    scale: BigInt,
    ipos: Vec<BigInt>,
    sums: Vec<BigInt>,
    /// `ipos[p] + sums[p]`, the coefficient of `2^{q-p}` in the piece offset.
    lead: Vec<BigInt>,
}

impl PrefixSums {
    /// Sums over the given positions, read left to right.
    pub fn new(positions: &[Scalar]) -> Self {
        let scale = positions
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ipos: Vec<BigInt> = positions
            .iter()
            .map(|x| x.numer() * (&scale / x.denom()))
            .collect();
        let mut sums = Vec::with_capacity(ipos.len());
        let mut acc = BigInt::zero();
        for (i, x) in ipos.iter().enumerate() {
            if i > 0 {
                acc = (acc << 1usize) + x;
            }
            sums.push(acc.clone());
        }
        let lead = ipos.iter().zip(&sums).map(|(a, b)| a + b).collect();
        PrefixSums { scale, ipos, sums, lead }
    }

    /// Sums for the left-to-right direction of `c`.
    pub fn lr(c: &LineConfig) -> Self {
        Self::new(c.positions())
    }

    /// Sums for the mirrored instance, used for the right-to-left direction.
    pub fn rl(c: &LineConfig) -> Self {
        Self::new(c.reflect().positions())
    }

    pub fn len(&self) -> usize {
        self.ipos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ipos.is_empty()
    }

    fn unscale(&self, v: BigInt) -> Scalar {
        Scalar::from_rational(BigRational::new(v, self.scale.clone()))
    }

    pub fn pos(&self, i: usize) -> Scalar {
        self.unscale(self.ipos[i - 1].clone())
    }

    /// `S(1, i)`.
    pub fn prefix(&self, i: usize) -> Scalar {
        self.unscale(self.sums[i - 1].clone())
    }

    /// `S(p, q) = sum_{i=p+1}^{q} 2^{q-i} Pos[i]` for `p <= q`.
    pub fn s(&self, p: usize, q: usize) -> Scalar {
        assert!(1 <= p && p <= q && q <= self.len());
        self.unscale(&self.sums[q - 1] - (&self.sums[p - 1] << (q - p)))
    }

    /// Scaled `2^{q-p} Pos[p] - S(p, q)`.
    fn offset_scaled(&self, p: usize, q: usize) -> BigInt {
        (&self.lead[p - 1] << (q - p)) - &self.sums[q - 1]
    }

    /// `ReachLR(q, P)` evaluated on the piece that starts at agent `p`:
    /// `2^{q-p} Pos[p] + (2^{q-p+1} - 1) P - S(p, q)`.
    pub fn reach_on_piece(&self, p: usize, q: usize, power: &Scalar) -> Scalar {
        self.unscale(self.offset_scaled(p, q)) + power * &Scalar::from_bigint(self.slope(p, q))
    }

    fn slope(&self, p: usize, q: usize) -> BigInt {
        (BigInt::one() << (q - p + 1)) - 1
    }

    /// Whether `ReachLR(q, P)` on the piece of `p` exceeds `Pos[x]`.
    fn exceeds(&self, p: usize, q: usize, power: &Frac, x: usize) -> bool {
        let lhs = self.offset_scaled(p, q) * &power.den + &self.scale * self.slope(p, q) * &power.num;
        lhs > &self.ipos[x - 1] * &power.den
    }

    /// Solves `ReachLR(q, P) = Pos[q+1]` on the piece of `p`.
    fn threshold_on_piece(&self, p: usize, q: usize) -> Frac {
        Frac {
            num: &self.ipos[q] - self.offset_scaled(p, q),
            den: &self.scale * self.slope(p, q),
        }
    }
}

/// An unreduced fraction with positive denominator. Reducing long
/// fractions dominates the cost of the linear-time sweep, so values are only
/// normalised when they leave this module.
#[derive(Clone, Debug)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn zero() -> Self {
        Frac { num: BigInt::zero(), den: BigInt::one() }
    }

    fn to_scalar(&self) -> Scalar {
        Scalar::from_rational(BigRational::new(self.num.clone(), self.den.clone()))
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// `S_LR(p, q)` for `p <= q`.
pub fn s_lr(c: &LineConfig, p: usize, q: usize) -> Scalar {
    PrefixSums::lr(c).s(p, q)
}

/// `S_RL(p, q) = sum_{i=q}^{p-1} 2^{i-q} Pos[i]` for `p >= q`.
pub fn s_rl(c: &LineConfig, p: usize, q: usize) -> Scalar {
    let n = c.n();
    -PrefixSums::rl(c).s(n + 1 - p, n + 1 - q)
}

/// Rightmost point reached by agents `1..=i`, by direct iteration.
pub fn reach_lr(c: &LineConfig, i: usize, power: &Scalar) -> Result<Scalar> {
    if i == 0 || i > c.n() {
        return Err(Error::Precondition(format!("index {i} out of range")));
    }
    let mut f = c.pos(1) + power;
    for j in 2..=i {
        if &(&f + power) < c.pos(j) {
            return Err(Error::Unreachable { index: j });
        }
        let b = Scalar::min_of(&f, c.pos(j));
        f = b.twice() + power - c.pos(j);
    }
    Ok(f)
}

/// Leftmost point reached by agents `i..=n`, by direct iteration.
pub fn reach_rl(c: &LineConfig, i: usize, power: &Scalar) -> Result<Scalar> {
    let n = c.n();
    if i == 0 || i > n {
        return Err(Error::Precondition(format!("index {i} out of range")));
    }
    let mut f = c.pos(n) - power;
    for j in (i..n).rev() {
        if &(&f - power) > c.pos(j) {
            return Err(Error::Unreachable { index: j });
        }
        let b = Scalar::max_of(&f, c.pos(j));
        f = b.twice() - power - c.pos(j);
    }
    Ok(f)
}

/// A stack of `(agent, threshold)` pairs, increasing in both components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdStack {
    pub entries: Vec<(usize, Scalar)>,
    /// Pushes plus pops performed while building it.
    pub ops: usize,
}

/// Threshold stack over left-to-right oriented sums, for agents `1..=r`.
fn build_stack(sums: &PrefixSums, r: usize) -> (Vec<(usize, Frac)>, usize) {
    let mut entries = vec![(1usize, Frac::zero())];
    let mut ops = 1;
    for q in 1..r {
        let th = loop {
            let (p, thp) = entries.last().expect("bottom is never popped");
            let cand = sums.threshold_on_piece(*p, q);
            if &cand > thp || entries.len() == 1 {
                break cand;
            }
            entries.pop();
            ops += 1;
        };
        entries.push((q + 1, th));
        ops += 1;
    }
    (entries, ops)
}

/// All thresholds of one direction, `th[p-1] = TH(p)`, plus the operation count.
fn all_thresholds(sums: &PrefixSums) -> (Vec<Frac>, usize) {
    let n = sums.len();
    let mut th = vec![Frac::zero(); n];
    let mut stack: Vec<usize> = vec![1];
    let mut ops = 1;
    for q in 1..n {
        let t = loop {
            let p = *stack.last().expect("bottom is never popped");
            let cand = sums.threshold_on_piece(p, q);
            if cand > th[p - 1] || stack.len() == 1 {
                break cand;
            }
            stack.pop();
            ops += 1;
        };
        th[q] = t;
        stack.push(q + 1);
        ops += 1;
    }
    (th, ops)
}

/// Stack of agents `p <= r` whose threshold is smaller than every later one up to `r`.
pub fn threshold_stack_lr(c: &LineConfig, r: usize) -> ThresholdStack {
    assert!(1 <= r && r <= c.n(), "index out of range");
    let (entries, ops) = build_stack(&PrefixSums::lr(c), r);
    ThresholdStack {
        entries: entries.into_iter().map(|(p, t)| (p, t.to_scalar())).collect(),
        ops,
    }
}

/// Mirror of [`threshold_stack_lr`] for agents `r..=n`; bottom is `(n, 0)`.
pub fn threshold_stack_rl(c: &LineConfig, r: usize) -> ThresholdStack {
    let n = c.n();
    assert!(1 <= r && r <= n, "index out of range");
    let (entries, ops) = build_stack(&PrefixSums::rl(c), n + 1 - r);
    ThresholdStack {
        entries: entries.into_iter().map(|(p, t)| (n + 1 - p, t.to_scalar())).collect(),
        ops,
    }
}

/// Smallest split `j` with `ReachLR(j, P) >= ReachRL(j+1, P)`, both defined.
/// A single agent needs no split and yields `Some(1)`.
pub fn decide_convergecast(c: &LineConfig, power: &Scalar) -> Option<usize> {
    let n = c.n();
    if n == 1 {
        return Some(1);
    }
    let mut lr: Vec<Option<Scalar>> = Vec::with_capacity(n);
    let mut f = Some(c.pos(1) + power);
    lr.push(f.clone());
    for j in 2..=n {
        f = f.and_then(|f| {
            if &(&f + power) < c.pos(j) {
                None
            } else {
                let b = Scalar::min_of(&f, c.pos(j));
                Some(b.twice() + power - c.pos(j))
            }
        });
        lr.push(f.clone());
    }
    let mut rl: Vec<Option<Scalar>> = vec![None; n];
    let mut g = Some(c.pos(n) - power);
    rl[n - 1] = g.clone();
    for j in (1..n).rev() {
        g = g.and_then(|g| {
            if &(&g - power) > c.pos(j) {
                None
            } else {
                let b = Scalar::max_of(&g, c.pos(j));
                Some(b.twice() - power - c.pos(j))
            }
        });
        rl[j - 1] = g.clone();
    }
    (1..n).find(|&j| match (&lr[j - 1], &rl[j]) {
        (Some(a), Some(b)) => a >= b,
        _ => false,
    })
}

/// Both directions in left-to-right orientation. Agent `j` of the line is
/// agent `n + 1 - j` of the mirrored side, and `ReachRL = -ReachLR'`.
struct Sides {
    n: usize,
    lr: PrefixSums,
    rl: PrefixSums,
}

impl Sides {
    fn new(c: &LineConfig) -> Self {
        Sides { n: c.n(), lr: PrefixSums::lr(c), rl: PrefixSums::rl(c) }
    }

    /// `ReachLR(r, P) - ReachRL(r+1, P)` on the pieces `p` (LR) and mirrored `q`.
    /// Both sides share the same scale since the mirrored positions have the same denominators.
    fn gap(&self, r: usize, p: usize, q: usize) -> Gap {
        Gap {
            offset: self.lr.offset_scaled(p, r) + self.rl.offset_scaled(q, self.n - r),
            slope: &self.lr.scale * (self.lr.slope(p, r) + self.rl.slope(q, self.n - r)),
        }
    }
}

/// `(offset + slope * P) / scale`, kept in integers.
struct Gap {
    offset: BigInt,
    slope: BigInt,
}

impl Gap {
    fn sign_at(&self, x: &Frac) -> Ordering {
        (&self.offset * &x.den + &self.slope * &x.num).cmp(&BigInt::zero())
    }

    fn root(&self) -> Frac {
        Frac { num: -&self.offset, den: self.slope.clone() }
    }
}

/// Unique `P` with `ReachLR(r, P) = ReachRL(r+1, P)`, for `1 <= r < n`.
pub fn optimal_at_index(c: &LineConfig, r: usize) -> Result<Scalar> {
    let n = c.n();
    if r == 0 || r >= n {
        return Err(Error::Precondition(format!("split {r} must lie in 1..{n}")));
    }
    let sides = Sides::new(c);
    let mut lr = build_stack(&sides.lr, r).0;
    let mut rl = build_stack(&sides.rl, n - r).0;
    loop {
        let (p, tp) = lr.last().expect("bottom stays");
        let (q, tq) = rl.last().expect("bottom stays");
        let lo = if tp >= tq { tp } else { tq };
        let line = sides.gap(r, *p, *q);
        if line.sign_at(lo) != Ordering::Greater {
            return Ok(line.root().to_scalar());
        }
        if tp >= tq && lr.len() > 1 {
            lr.pop();
        } else {
            rl.pop();
        }
    }
}

/// Plan of a regular convergecast strategy: agents `1..=split` carry to the
/// right, the others to the left. Arrays are indexed by `agent - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularConvPlan {
    pub power: Scalar,
    pub split: usize,
    pub b: Vec<Scalar>,
    pub f: Vec<Scalar>,
}

impl RegularConvPlan {
    /// Checks the defining relations of a regular strategy against `c`.
    pub fn check(&self, c: &LineConfig) -> Result<()> {
        let n = c.n();
        let p = &self.power;
        if self.b.len() != n || self.f.len() != n || self.split == 0 || self.split > n {
            return Err(Error::Invalid("plan does not match the instance".into()));
        }
        let bad = |i: usize, what: &str| Err(Error::Invalid(format!("agent {i}: {what}")));
        for i in 1..=self.split {
            let (b, f) = (&self.b[i - 1], &self.f[i - 1]);
            let expect_b = if i == 1 { c.pos(1).clone() } else { Scalar::min_of(&self.f[i - 2], c.pos(i)) };
            if *b != expect_b {
                return bad(i, "pickup point is not min(f_{i-1}, Pos[i])");
            }
            if *f != b.twice() + p - c.pos(i) {
                return bad(i, "drop point is not 2b + P - Pos[i]");
            }
            if &(c.pos(i) - b) > p {
                return bad(i, "pickup point out of reach");
            }
        }
        for i in self.split + 1..=n {
            let (b, f) = (&self.b[i - 1], &self.f[i - 1]);
            let expect_b = if i == n { c.pos(n).clone() } else { Scalar::max_of(&self.f[i], c.pos(i)) };
            if *b != expect_b {
                return bad(i, "pickup point is not max(f_{i+1}, Pos[i])");
            }
            if *f != b.twice() - p - c.pos(i) {
                return bad(i, "drop point is not 2b - P - Pos[i]");
            }
            if &(b - c.pos(i)) > p {
                return bad(i, "pickup point out of reach");
            }
        }
        if self.split < n {
            let left = self.f[..self.split].iter().max().expect("non-empty");
            let right = self.f[self.split..].iter().min().expect("non-empty");
            if left < right {
                return Err(Error::Invalid("the two carriers never meet".into()));
            }
        }
        Ok(())
    }
}

/// Builds the regular plan for a given split and power, if it is feasible.
pub fn regular_conv_plan(c: &LineConfig, split: usize, power: &Scalar) -> Result<RegularConvPlan> {
    let n = c.n();
    if split == 0 || split > n || (split == n && n > 1) {
        return Err(Error::Precondition(format!("split {split} out of range")));
    }
    let mut b = vec![Scalar::zero(); n];
    let mut f = vec![Scalar::zero(); n];
    for i in 1..=split {
        if i == 1 {
            b[0] = c.pos(1).clone();
        } else {
            if &(&f[i - 2] + power) < c.pos(i) {
                return Err(Error::Unreachable { index: i });
            }
            b[i - 1] = Scalar::min_of(&f[i - 2], c.pos(i));
        }
        f[i - 1] = b[i - 1].twice() + power - c.pos(i);
    }
    for i in (split + 1..=n).rev() {
        if i == n {
            b[n - 1] = c.pos(n).clone();
        } else {
            if &(&f[i] - power) > c.pos(i) {
                return Err(Error::Unreachable { index: i });
            }
            b[i - 1] = Scalar::max_of(&f[i], c.pos(i));
        }
        f[i - 1] = b[i - 1].twice() - power - c.pos(i);
    }
    let plan = RegularConvPlan { power: power.clone(), split, b, f };
    if split < n && f_gap(&plan) {
        return Err(Error::Infeasible(format!("carriers do not meet at power {power}")));
    }
    Ok(plan)
}

fn f_gap(plan: &RegularConvPlan) -> bool {
    let left = plan.f[..plan.split].iter().max().expect("non-empty");
    let right = plan.f[plan.split..].iter().min().expect("non-empty");
    left < right
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergecastOptimum {
    pub power: Scalar,
    pub split: usize,
    pub plan: RegularConvPlan,
    /// Stack pushes and pops, including the mirrored threshold pass.
    pub stack_ops: usize,
}

/// Optimal power for convergecast in `O(n)` stack operations.
///
/// Sweeps the split `r` from left to right while the best power found so far
/// only decreases. The left stack keeps the agents `p <= r` whose thresholds
/// stay below the current best, so its top is the active piece of
/// `ReachLR(r, .)`. On the right side the active piece of `ReachRL(r+1, .)`
/// is the first agent at or after `r+1` whose threshold is below the best,
/// which moves monotonically to the right.
pub fn compute_optimal_convergecast(c: &LineConfig) -> ConvergecastOptimum {
    let n = c.n();
    if n == 1 {
        return ConvergecastOptimum {
            power: Scalar::zero(),
            split: 1,
            plan: RegularConvPlan {
                power: Scalar::zero(),
                split: 1,
                b: vec![c.pos(1).clone()],
                f: vec![c.pos(1).clone()],
            },
            stack_ops: 0,
        };
    }
    let sides = Sides::new(c);
    let (th_rl, mut ops) = all_thresholds(&sides.rl);
    // mirrored index of the active right piece
    let mut qp = n - 1;
    let mut lr: Vec<(usize, Frac)> = vec![(1, Frac::zero())];
    ops += 1;
    let mut best: Option<Frac> = None;
    let mut best_r = 1;

    for r in 1..n {
        let rm = n - r;
        while qp > rm || best.as_ref().is_some_and(|b| &th_rl[qp - 1] > b) {
            qp -= 1;
            ops += 1;
        }
        if let (Some(b), true) = (&best, r > 1) {
            // agent r joins the left stack only if its threshold is below the best
            let (p, _) = lr.last().expect("bottom stays");
            if sides.lr.exceeds(*p, r - 1, b, r) {
                let th = loop {
                    let (p, tp) = lr.last().expect("bottom stays");
                    let cand = sides.lr.threshold_on_piece(*p, r - 1);
                    if &cand > tp || lr.len() == 1 {
                        break cand;
                    }
                    lr.pop();
                    ops += 1;
                };
                lr.push((r, th));
                ops += 1;
            }
        }
        let improves = match &best {
            None => true,
            Some(b) => {
                let p = lr.last().expect("bottom stays").0;
                sides.gap(r, p, qp).sign_at(b) == Ordering::Greater
            }
        };
        if !improves {
            continue;
        }
        let found = loop {
            let (p, tp) = lr.last().expect("bottom stays");
            let tq = &th_rl[qp - 1];
            let pop_left = tp >= tq;
            let lo = if pop_left { tp.clone() } else { tq.clone() };
            let line = sides.gap(r, *p, qp);
            if line.sign_at(&lo) != Ordering::Greater {
                break line.root();
            }
            if pop_left && lr.len() > 1 {
                lr.pop();
                ops += 1;
            } else {
                while th_rl[qp - 1] >= lo {
                    qp -= 1;
                    ops += 1;
                }
            }
        };
        best = Some(found);
        best_r = r;
    }
    let power = best.expect("n >= 2 yields a candidate").to_scalar();
    let plan = regular_conv_plan(c, best_r, &power).expect("optimal power admits a regular plan");
    ConvergecastOptimum { power, split: best_r, plan, stack_ops: ops }
}
