//! Instance generators: reduction stars from 3-partition, the lower-bound
//! line family for distributed algorithms, and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LineConfig, Location, WeightedGraph, WeightedTree};
use crate::scalar::Scalar;
use crate::strategy::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Convergecast,
    Broadcast,
}

/// A multiset of `3m` integers with `R/4 < x < R/2` for `R = sum / m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    m: usize,
    xs: Vec<u64>,
    r: u64,
}

impl ThreePartitionInstance {
    pub fn new(xs: Vec<u64>) -> Result<Self> {
        if xs.is_empty() || !xs.len().is_multiple_of(3) {
            return Err(Error::Invalid(format!("need 3m values, got {}", xs.len())));
        }
        let m = xs.len() / 3;
        if xs.contains(&0) {
            return Err(Error::Invalid("values must be positive".into()));
        }
        let sum: u64 = xs.iter().sum();
        if !sum.is_multiple_of(m as u64) {
            return Err(Error::Invalid(format!("sum {sum} is not a multiple of m = {m}")));
        }
        let r = sum / m as u64;
        if let Some(x) = xs.iter().find(|&&x| !(4 * x > r && 2 * x < r)) {
            return Err(Error::Invalid(format!("value {x} is not strictly between R/4 and R/2 for R = {r}")));
        }
        Ok(ThreePartitionInstance { m, xs, r })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[u64] {
        &self.xs
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// Checks that `parts` (positions into the multiset) form a 3-partition.
    pub fn check_partition(&self, parts: &[Vec<usize>]) -> Result<()> {
        if parts.len() != self.m {
            return Err(Error::Invalid(format!("need {} parts, got {}", self.m, parts.len())));
        }
        let mut seen = vec![false; self.xs.len()];
        for (j, part) in parts.iter().enumerate() {
            if part.len() != 3 {
                return Err(Error::Invalid(format!("part {} has {} elements", j + 1, part.len())));
            }
            for &i in part {
                if i >= self.xs.len() || seen[i] {
                    return Err(Error::Invalid(format!("element {i} missing or used twice")));
                }
                seen[i] = true;
            }
            let s: u64 = part.iter().map(|&i| self.xs[i]).sum();
            if s != self.r {
                return Err(Error::Invalid(format!("part {} sums to {s}, not {}", j + 1, self.r)));
            }
        }
        Ok(())
    }
}

/// A reduction star. Agents are numbered A first, then B, then C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarInstance {
    pub tree: WeightedTree,
    pub power: Scalar,
    pub source: Option<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

fn star(a_w: &[u64], b_w: &[u64], c_w: &[u64], power: u64, source: Option<usize>) -> StarInstance {
    let mut nodes = vec!["center".to_string()];
    let mut edges = Vec::new();
    let mut agents = Vec::new();
    let mut ids = [Vec::new(), Vec::new(), Vec::new()];
    for (group, (prefix, ws)) in [("a", a_w), ("b", b_w), ("c", c_w)].into_iter().enumerate() {
        for (i, &w) in ws.iter().enumerate() {
            let node = nodes.len();
            nodes.push(format!("{prefix}{}", i + 1));
            edges.push((0, node, Scalar::from_int(w as i64)));
            agents.push(node);
            ids[group].push(agents.len());
        }
    }
    let g = WeightedGraph::new(nodes, edges, agents, source).expect("star is valid");
    let [a, b, c] = ids;
    StarInstance {
        tree: WeightedTree::new(g).expect("a star is a tree"),
        power: Scalar::from_int(power as i64),
        source,
        a,
        b,
        c,
    }
}

/// Star with `m+1` leaves at distance 1, `3m` at `2R+1+x_i` and one at `4R+1`; `P = 2R+1`.
pub fn gen_3p_convergecast_star(inst: &ThreePartitionInstance) -> StarInstance {
    let r = inst.r;
    let a = vec![1; inst.m + 1];
    let b: Vec<u64> = inst.xs.iter().map(|x| 2 * r + 1 + x).collect();
    star(&a, &b, &[4 * r + 1], 2 * r + 1, None)
}

/// Star with `m` leaves at distance 1, `3m` at `4R+1+x_i` and `m` at `6R+1`;
/// `P = 4R+1` and the source is `a_1`.
pub fn gen_3p_broadcast_star(inst: &ThreePartitionInstance) -> StarInstance {
    let r = inst.r;
    let a = vec![1; inst.m];
    let b: Vec<u64> = inst.xs.iter().map(|x| 4 * r + 1 + x).collect();
    let c = vec![6 * r + 1; inst.m];
    star(&a, &b, &c, 4 * r + 1, Some(1))
}

/// A schedule showing that a yes-instance is feasible at exactly `P`.
///
/// Every B and C agent walks `P` toward the centre, every A agent reaches the
/// centre at time 1. From time `P` the A agent of part `j` fetches the three
/// B agents of that part one after the other; the A agents are back at the
/// centre at `P + 2R` and then walk `2R` to meet the C agents.
pub fn proof_strategy_for_partition(
    inst: &ThreePartitionInstance,
    parts: &[Vec<usize>],
    task: Task,
) -> Result<(StarInstance, Strategy)> {
    inst.check_partition(parts)?;
    let st = match task {
        Task::Convergecast => gen_3p_convergecast_star(inst),
        Task::Broadcast => gen_3p_broadcast_star(inst),
    };
    let g = st.tree.graph();
    let p = st.power.clone();
    let r = Scalar::from_int(inst.r as i64);
    let zero = Scalar::zero();
    let center = Location::Node(0);
    let edge_of = |agent: usize| {
        let node = g.agent_node(agent);
        g.edge_between(0, node).expect("leaf edge")
    };
    let inner = |agent: usize, dist: &Scalar| Location::Interior { edge: edge_of(agent), offset: dist.clone() };

    let mut s = Strategy::new();
    for (i, &b) in st.b.iter().enumerate() {
        let x = Scalar::from_int(inst.xs[i] as i64);
        s.push(b, zero.clone(), Location::Node(g.agent_node(b)), inner(b, &x));
    }
    let two_r = r.twice();
    for &c in &st.c {
        s.push(c, zero.clone(), Location::Node(g.agent_node(c)), inner(c, &two_r));
    }
    for &a in &st.a {
        s.push(a, zero.clone(), Location::Node(g.agent_node(a)), center.clone());
    }
    for (j, part) in parts.iter().enumerate() {
        let a = st.a[j];
        let mut t = p.clone();
        for &i in part {
            let b = st.b[i];
            let x = Scalar::from_int(inst.xs[i] as i64);
            s.push(a, t.clone(), center.clone(), inner(b, &x));
            s.push(a, &t + &x, inner(b, &x), center.clone());
            t += x.twice();
        }
    }
    let back = &p + &two_r;
    match task {
        Task::Convergecast => {
            let a = *st.a.last().expect("m + 1 collectors");
            s.push(a, back, center, inner(st.c[0], &two_r));
        }
        Task::Broadcast => {
            for (j, &c) in st.c.iter().enumerate() {
                s.push(st.a[j], back.clone(), center.clone(), inner(c, &two_r));
            }
        }
    }
    Ok((st, s))
}

/// Searches for a 3-partition by assigning every B edge to one collecting A
/// agent whose fetching cost `2 * sum` stays within `2R`. This mirrors the
/// structure of simple strategies used in the reduction and is not a general
/// solver for the star instance. Limited to `m <= 3`.
pub fn restricted_star_check(inst: &ThreePartitionInstance) -> Result<Option<Vec<Vec<usize>>>> {
    let m = inst.m;
    if m > 3 {
        return Err(Error::TooLarge(format!("restricted check supports m <= 3, got {m}")));
    }
    let n = inst.xs.len();
    let mut assign = vec![0usize; n];
    let mut load = vec![0u64; m];
    fn go(i: usize, inst: &ThreePartitionInstance, assign: &mut [usize], load: &mut [u64]) -> bool {
        if i == assign.len() {
            return load.iter().all(|&l| l == inst.r);
        }
        for j in 0..load.len() {
            if load[j] + inst.xs[i] <= inst.r {
                load[j] += inst.xs[i];
                assign[i] = j;
                if go(i + 1, inst, assign, load) {
                    return true;
                }
                load[j] -= inst.xs[i];
            }
        }
        false
    }
    if !go(0, inst, &mut assign, &mut load) {
        return Ok(None);
    }
    let mut parts = vec![Vec::new(); m];
    for (i, &j) in assign.iter().enumerate() {
        parts[j].push(i);
    }
    Ok(Some(parts))
}

/// Parameters of the lower-bound family for distributed algorithms on lines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundFamily {
    pub delta: Scalar,
    pub power: Scalar,
    pub epsilon: Scalar,
    pub sigma: Scalar,
    pub l: usize,
    pub k: usize,
    pub n: usize,
}

impl LowerBoundFamily {
    pub fn new(delta: &Scalar, power: &Scalar) -> Result<Self> {
        if !delta.is_positive() || delta >= &Scalar::from_int(2) {
            return Err(Error::Precondition(format!("delta {delta} must lie in (0, 2)")));
        }
        if !power.is_positive() {
            return Err(Error::Precondition("power must be positive".into()));
        }
        let epsilon = delta * power / Scalar::from_int(4);
        let sigma = epsilon.half();
        let l = (Scalar::from_int(8) / delta).floor_log2().expect("positive") as usize;
        let k = l + 2;
        let n = 2 * l * k + 2;
        Ok(LowerBoundFamily { delta: delta.clone(), power: power.clone(), epsilon, sigma, l, k, n })
    }

    /// `s_i = (2P - 3 sigma) i - sigma`.
    pub fn s(&self, i: usize) -> Scalar {
        self.step() * Scalar::from_int(i as i64) - &self.sigma
    }

    /// `s'_i = (2P - 3 sigma) i`.
    pub fn s_prime(&self, i: usize) -> Scalar {
        self.step() * Scalar::from_int(i as i64)
    }

    fn step(&self) -> Scalar {
        self.power.twice() - Scalar::from_int(3) * &self.sigma
    }

    pub fn positions(&self) -> Vec<Scalar> {
        let mut xs = vec![Scalar::zero()];
        let gap = &self.sigma / &Scalar::from_int(self.k as i64 + 1);
        for i in 1..=2 * self.l {
            let base = self.s(i);
            for j in 1..=self.k {
                xs.push(&base + &(&gap * &Scalar::from_int(j as i64)));
            }
        }
        xs.push(self.s(2 * self.l + 1));
        xs
    }
}

pub fn gen_lower_bound_line(delta: &Scalar, power: &Scalar) -> Result<LineConfig> {
    LineConfig::new(LowerBoundFamily::new(delta, power)?.positions())
}

/// Line with positive rational gaps `k/d`, `k <= 100`, `d <= 8`, starting at 0.
pub fn gen_random_line(n: usize, seed: u64) -> LineConfig {
    assert!(n >= 1, "need at least one agent");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Scalar::zero();
    let mut xs = vec![x.clone()];
    for _ in 1..n {
        x += Scalar::ratio(rng.gen_range(1..=100), rng.gen_range(1..=8));
        xs.push(x.clone());
    }
    LineConfig::new(xs).expect("gaps are positive")
}

/// Random tree on `n` nodes with weights in `(0, 100)` (multiples of 1/100)
/// and an agent at every leaf; each inner node also hosts an agent with
/// probability `inner_agents`.
pub fn gen_random_tree_with(n: usize, seed: u64, inner_agents: f64) -> WeightedTree {
    assert!(n >= 1, "need at least one node");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let u = rng.gen_range(0..v);
        degree[u] += 1;
        degree[v] += 1;
        edges.push((u, v, Scalar::ratio(rng.gen_range(1..10_000), 100)));
    }
    let agents: Vec<usize> = (0..n)
        .filter(|&v| degree[v] <= 1 || rng.gen_bool(inner_agents))
        .collect();
    let g = WeightedGraph::new(nodes, edges, agents, None).expect("random tree is valid");
    WeightedTree::new(g).expect("n - 1 edges")
}

/// Random tree with agents exactly at the leaves.
pub fn gen_random_tree(n: usize, seed: u64) -> WeightedTree {
    gen_random_tree_with(n, seed, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sc;

    fn weights(st: &StarInstance) -> Vec<Scalar> {
        st.tree.edges().iter().map(|e| e.w.clone()).collect()
    }

    #[test]
    fn convergecast_star() {
        let inst = ThreePartitionInstance::new(vec![6, 7, 7]).unwrap();
        assert_eq!(inst.r(), 20);
        let st = gen_3p_convergecast_star(&inst);
        let w: Vec<Scalar> = ["1", "1", "47", "48", "48", "81"].iter().map(|x| sc(x)).collect();
        assert_eq!(weights(&st), w);
        assert_eq!(st.power, sc("41"));
        let inst2 = ThreePartitionInstance::new(vec![6, 7, 7, 6, 7, 7]).unwrap();
        let st2 = gen_3p_convergecast_star(&inst2);
        assert_eq!(st2.tree.leaves().len(), 10);
        assert_eq!((st2.a.len(), st2.b.len(), st2.c.len()), (3, 6, 1));
    }

    #[test]
    fn broadcast_star() {
        let inst = ThreePartitionInstance::new(vec![6, 7, 7]).unwrap();
        let st = gen_3p_broadcast_star(&inst);
        let w: Vec<Scalar> = ["1", "87", "88", "88", "121"].iter().map(|x| sc(x)).collect();
        assert_eq!(weights(&st), w);
        assert_eq!((st.power.clone(), st.source), (sc("81"), Some(1)));
        let st2 = gen_3p_broadcast_star(&ThreePartitionInstance::new(vec![6, 7, 7, 6, 7, 7]).unwrap());
        assert_eq!(st2.tree.leaves().len(), 10);
        assert_eq!(st2.power, sc("81"));
    }

    #[test]
    fn invariant_boundaries() {
        assert!(ThreePartitionInstance::new(vec![5, 7, 8]).is_err());
        assert!(ThreePartitionInstance::new(vec![6, 7]).is_err());
        assert!(ThreePartitionInstance::new(vec![6, 7, 7, 6, 7, 8]).is_err());
    }

    #[test]
    fn partitions() {
        let inst = ThreePartitionInstance::new(vec![6, 7, 7, 6, 7, 7]).unwrap();
        assert!(inst.check_partition(&[vec![0, 1, 2], vec![3, 4, 5]]).is_ok());
        assert!(inst.check_partition(&[vec![0, 3, 1], vec![2, 4, 5]]).is_err());
        let found = restricted_star_check(&inst).unwrap().unwrap();
        inst.check_partition(&found).unwrap();
    }

    #[test]
    fn lower_bound_family() {
        let f = LowerBoundFamily::new(&sc("1/2"), &sc("8")).unwrap();
        assert_eq!((f.l, f.k, f.n), (4, 6, 50));
        assert_eq!((f.epsilon.clone(), f.sigma.clone()), (sc("1"), sc("1/2")));
        assert_eq!((f.s(1), f.s_prime(1)), (sc("14"), sc("29/2")));
        assert_eq!((f.s(9), f.s_prime(9)), (sc("130"), sc("261/2")));
        let c = gen_lower_bound_line(&sc("1/2"), &sc("8")).unwrap();
        assert_eq!(c.n(), 50);
        assert_eq!(c.pos(50), &sc("130"));
        let f = LowerBoundFamily::new(&sc("1"), &sc("4")).unwrap();
        assert_eq!((f.l, f.k, f.n), (3, 5, 32));
        assert!(LowerBoundFamily::new(&sc("2"), &sc("4")).is_err());
    }

    #[test]
    fn random_generators_are_reproducible() {
        assert_eq!(gen_random_line(3, 7), gen_random_line(3, 7));
        assert_eq!(gen_random_line(1, 7).n(), 1);
        assert_eq!(gen_random_line(100, 3).n(), 100);
        assert_eq!(gen_random_tree(30, 5), gen_random_tree(30, 5));
        let t = gen_random_tree(30, 5);
        crate::model::validate_tree_for_distributed(&t).unwrap();
    }
}
