//! Shortest paths, the separation bound and approximate strategies on known graphs.
//!
//! The separation `D(G, A)` of the agent nodes `A` is the largest distance
//! across any bipartition of `A`, measured between the closest pair. No
//! convergecast can succeed with less than `D / 2` per agent, and the
//! accretion strategy below succeeds with exactly `D`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{Location, WeightedGraph};
use crate::scalar::Scalar;
use crate::strategy::Strategy;

/// All-pairs shortest-path distances with predecessor links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    dist: Vec<Vec<Scalar>>,
    pred: Vec<Vec<Option<usize>>>,
}

impl DistanceMatrix {
    pub fn dist(&self, x: usize, y: usize) -> &Scalar {
        &self.dist[x][y]
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Nodes of a shortest path from `x` to `y`, both included.
    pub fn path(&self, x: usize, y: usize) -> Vec<usize> {
        let mut out = vec![y];
        let mut cur = y;
        while cur != x {
            cur = self.pred[x][cur].expect("connected graph");
            out.push(cur);
        }
        out.reverse();
        out
    }
}

/// Dijkstra from every node. Among equally short paths the predecessor with
/// the smaller node index wins, so paths are deterministic.
pub fn apsp(g: &WeightedGraph) -> Result<DistanceMatrix> {
    let n = g.node_count();
    let mut dist = Vec::with_capacity(n);
    let mut pred = Vec::with_capacity(n);
    for s in 0..n {
        let mut d: Vec<Option<Scalar>> = vec![None; n];
        let mut p: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        d[s] = Some(Scalar::zero());
        heap.push(Reverse((Scalar::zero(), s)));
        while let Some(Reverse((dx, x))) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            for &(y, e) in g.adjacency(x) {
                let cand = &dx + &g.edge(e).w;
                let better = match &d[y] {
                    None => true,
                    Some(cur) => cand < *cur || (cand == *cur && p[y].is_some_and(|q| x < q)),
                };
                if better && !done[y] {
                    d[y] = Some(cand.clone());
                    p[y] = Some(x);
                    heap.push(Reverse((cand, y)));
                }
            }
        }
        let row: Option<Vec<Scalar>> = d.into_iter().collect();
        dist.push(row.ok_or_else(|| Error::Invalid("graph is disconnected".into()))?);
        pred.push(p);
    }
    Ok(DistanceMatrix { dist, pred })
}

/// Prim's algorithm on the metric closure of `nodes`, started at `nodes[0]`.
/// Returns `(parent position, child position, distance)` in accretion order.
/// Ties are broken by the smallest `(u, v)` node pair.
fn accretion(d: &DistanceMatrix, nodes: &[usize]) -> Vec<(usize, usize, Scalar)> {
    let m = nodes.len();
    let mut inside = vec![false; m];
    inside[0] = true;
    // best[j] = (distance, parent position) to the tree
    let mut best: Vec<(Scalar, usize)> = (0..m).map(|j| (d.dist(nodes[0], nodes[j]).clone(), 0)).collect();
    let mut order = Vec::with_capacity(m.saturating_sub(1));
    for _ in 1..m {
        let j = (0..m)
            .filter(|&j| !inside[j])
            .min_by(|&a, &b| {
                let ka = (&best[a].0, nodes[best[a].1], nodes[a]);
                let kb = (&best[b].0, nodes[best[b].1], nodes[b]);
                ka.cmp(&kb)
            })
            .expect("some agent remains");
        inside[j] = true;
        order.push((best[j].1, j, best[j].0.clone()));
        for t in 0..m {
            if inside[t] {
                continue;
            }
            let cand = d.dist(nodes[j], nodes[t]);
            let (cur, par) = &best[t];
            if cand < cur || (cand == cur && nodes[j] < nodes[*par]) {
                best[t] = (cand.clone(), j);
            }
        }
    }
    order
}

/// Bottleneck of a minimum spanning tree on the metric closure of `agents`.
pub fn separation(g: &WeightedGraph, agents: &[usize]) -> Result<Scalar> {
    Ok(separation_witness(g, agents)?.0)
}

/// The separation together with a side `X` (positions into `agents`) of a
/// bipartition attaining it, obtained by cutting the bottleneck tree edge.
pub fn separation_witness(g: &WeightedGraph, agents: &[usize]) -> Result<(Scalar, Vec<usize>)> {
    if agents.len() < 2 {
        return Err(Error::Precondition("separation needs at least two agents".into()));
    }
    let d = apsp(g)?;
    let order = accretion(&d, agents);
    let (cut, _) = order
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .2.cmp(&b.1 .2).then(b.0.cmp(&a.0)))
        .expect("at least one tree edge");
    // the subtree hanging below the cut edge
    let mut side = vec![order[cut].1];
    for (p, c, _) in &order[cut + 1..] {
        if side.contains(p) {
            side.push(*c);
        }
    }
    side.sort();
    Ok((order[cut].2.clone(), side))
}

/// Least distance between the two sides of a bipartition of `agents`.
pub fn cross_distance(d: &DistanceMatrix, agents: &[usize], side: &[bool]) -> Scalar {
    let mut best: Option<Scalar> = None;
    for (i, &x) in agents.iter().enumerate() {
        for (j, &y) in agents.iter().enumerate() {
            if side[i] && !side[j] {
                let v = d.dist(x, y);
                if best.as_ref().is_none_or(|b| v < b) {
                    best = Some(v.clone());
                }
            }
        }
    }
    best.expect("both sides non-empty")
}

/// Separation by enumerating every bipartition of at most 20 agents.
pub fn brute_force_separation(g: &WeightedGraph, agents: &[usize]) -> Result<Scalar> {
    let m = agents.len();
    if m < 2 {
        return Err(Error::Precondition("separation needs at least two agents".into()));
    }
    if m > 20 {
        return Err(Error::TooLarge(format!("{m} agents exceed the enumeration limit of 20")));
    }
    let d = apsp(g)?;
    let mut best = Scalar::zero();
    // agent 0 always on the X side
    for mask in 0u32..(1 << (m - 1)) {
        let side: Vec<bool> = (0..m).map(|i| i == 0 || mask >> (i - 1) & 1 == 1).collect();
        if side.iter().all(|&s| s) {
            continue;
        }
        best = Scalar::max_of(&best, &cross_distance(&d, agents, &side));
    }
    Ok(best)
}

/// Moves along a node path starting at time `t`, one move per edge; returns the end time.
fn walk(g: &WeightedGraph, s: &mut Strategy, agent: usize, path: &[usize], mut t: Scalar) -> Scalar {
    for w in path.windows(2) {
        s.push(agent, t.clone(), Location::Node(w[0]), Location::Node(w[1]));
        let e = g.edge_between(w[0], w[1]).expect("consecutive path nodes are adjacent");
        t += &g.edge(e).w;
    }
    t
}

/// Accretion strategy for convergecast. Agents are attached to a growing tree
/// rooted at agent 1, nearest first; the attachments are then replayed in
/// reverse, each new agent walking a shortest path to its parent's node one
/// after the other. Agent 1 ends up holding all information.
pub fn known_graph_convergecast(g: &WeightedGraph) -> Result<(Strategy, usize)> {
    let nodes = g.agent_nodes();
    if nodes.is_empty() {
        return Err(Error::Precondition("no agents".into()));
    }
    let d = apsp(g)?;
    let order = accretion(&d, nodes);
    let mut s = Strategy::new();
    let mut t = Scalar::zero();
    for (parent, child, _) in order.iter().rev() {
        let path = d.path(nodes[*child], nodes[*parent]);
        t = walk(g, &mut s, child + 1, &path, t);
    }
    Ok((s, 1))
}

/// Convergecast followed by every move reversed in reverse order, which
/// spreads the collected information back to every agent.
pub fn graph_broadcast_4approx(g: &WeightedGraph, source: usize) -> Result<Strategy> {
    if source == 0 || source > g.agent_count() {
        return Err(Error::Precondition(format!("source {source} is not an agent")));
    }
    let (conv, _) = known_graph_convergecast(g)?;
    let length = |m: &crate::strategy::TimedMove| match (&m.from, &m.to) {
        (Location::Node(a), Location::Node(b)) => {
            g.edge(g.edge_between(*a, *b).expect("path edge")).w.clone()
        }
        _ => unreachable!("accretion moves run between nodes"),
    };
    let makespan = conv
        .moves
        .iter()
        .map(|m| &m.depart + &length(m))
        .max()
        .unwrap_or_else(Scalar::zero);
    let mut s = conv.clone();
    for m in conv.moves.iter().rev() {
        let end = &m.depart + &length(m);
        s.push(m.agent, makespan.twice() - end, m.to.clone(), m.from.clone());
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LineConfig;
    use crate::scalar::sc;
    use crate::strategy::{max_power_used, simulate, verify_broadcast, verify_convergecast, Network};

    fn star123() -> WeightedGraph {
        let nodes = ["c", "l1", "l2", "l3"].map(String::from).to_vec();
        let edges = vec![(0, 1, sc("1")), (0, 2, sc("2")), (0, 3, sc("3"))];
        WeightedGraph::new(nodes, edges, vec![1, 2, 3], None).unwrap()
    }

    fn path048() -> WeightedGraph {
        WeightedGraph::path_from_line(&LineConfig::from_ints(&[0, 4, 8]).unwrap())
    }

    #[test]
    fn distances() {
        let d = apsp(&path048()).unwrap();
        assert_eq!(d.dist(0, 2), &sc("8"));
        assert_eq!(d.path(0, 2), vec![0, 1, 2]);
        let nodes = ["a", "b", "c"].map(String::from).to_vec();
        let tri = WeightedGraph::new(nodes, vec![(0, 1, sc("1")), (1, 2, sc("1")), (0, 2, sc("3"))], vec![], None).unwrap();
        assert_eq!(apsp(&tri).unwrap().dist(0, 2), &sc("2"));
        let d = apsp(&star123()).unwrap();
        assert_eq!((d.dist(1, 2), d.dist(1, 3), d.dist(2, 3)), (&sc("3"), &sc("4"), &sc("5")));
    }

    #[test]
    fn separations() {
        let g = path048();
        assert_eq!(separation(&g, g.agent_nodes()).unwrap(), sc("4"));
        assert_eq!(brute_force_separation(&g, g.agent_nodes()).unwrap(), sc("4"));
        let g = star123();
        assert_eq!(separation(&g, g.agent_nodes()).unwrap(), sc("4"));
        assert_eq!(brute_force_separation(&g, g.agent_nodes()).unwrap(), sc("4"));
        let (_, side) = separation_witness(&g, g.agent_nodes()).unwrap();
        assert_eq!(side, vec![2]);
        assert!(separation(&g, &g.agent_nodes()[..1]).is_err());
    }

    #[test]
    fn accretion_on_path() {
        let g = path048();
        let (s, collector) = known_graph_convergecast(&g).unwrap();
        assert_eq!(collector, 1);
        assert_eq!(s.moves[0].agent, 3);
        assert_eq!(s.moves[1].agent, 2);
        assert_eq!(s.moves[1].depart, sc("4"));
        let tr = simulate(Network::Graph(&g), &s, &sc("4")).unwrap();
        assert_eq!(verify_convergecast(&tr).unwrap().agent, 1);
        assert_eq!(max_power_used(&tr).1, vec![sc("0"), sc("4"), sc("4")]);
    }

    #[test]
    fn star_strategies() {
        let g = star123();
        let (s, _) = known_graph_convergecast(&g).unwrap();
        let tr = simulate(Network::Graph(&g), &s, &sc("4")).unwrap();
        assert!(verify_convergecast(&tr).is_ok());
        assert_eq!(max_power_used(&tr).0, sc("4"));
        let b = graph_broadcast_4approx(&g, 1).unwrap();
        let tr = simulate(Network::Graph(&g), &b, &sc("8")).unwrap();
        assert!(verify_broadcast(&tr, 1).is_ok());
    }

    #[test]
    fn two_agents_ratio_four() {
        let g = WeightedGraph::path_from_line(&LineConfig::from_ints(&[0, 6]).unwrap());
        let b = graph_broadcast_4approx(&g, 2).unwrap();
        let tr = simulate(Network::Graph(&g), &b, &sc("12")).unwrap();
        assert!(verify_broadcast(&tr, 2).is_ok());
        assert_eq!(max_power_used(&tr).0, sc("12"));
    }

    #[test]
    fn single_agent() {
        let g = WeightedGraph::new(vec!["x".into()], vec![], vec![0], Some(1)).unwrap();
        assert!(known_graph_convergecast(&g).unwrap().0.is_empty());
        assert!(graph_broadcast_4approx(&g, 1).unwrap().is_empty());
    }
}
