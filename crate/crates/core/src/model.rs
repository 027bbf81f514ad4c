//! Instances: agents on a line, or agents on the nodes of a weighted graph or tree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Agents on a line. Agent `i` (1-based) sits at `positions[i-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineConfig {
    positions: Vec<Scalar>,
    source: Option<usize>,
}

impl LineConfig {
    pub fn new(positions: Vec<Scalar>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Invalid("a line needs at least one agent".into()));
        }
        for (i, w) in positions.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::Invalid(format!(
                    "positions not strictly increasing at index {} ({} >= {})",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(LineConfig { positions, source: None })
    }

    pub fn with_source(mut self, source: Option<usize>) -> Result<Self> {
        if let Some(k) = source {
            if k == 0 || k > self.n() {
                return Err(Error::Invalid(format!("source {k} out of range 1..={}", self.n())));
            }
        }
        self.source = source;
        Ok(self)
    }

    pub fn from_ints(xs: &[i64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Position of agent `i`, 1-based.
    pub fn pos(&self, i: usize) -> &Scalar {
        &self.positions[i - 1]
    }

    pub fn positions(&self) -> &[Scalar] {
        &self.positions
    }

    pub fn source(&self) -> Option<usize> {
        self.source
    }

    /// Mirror image `x -> -x`; agent `i` becomes agent `n + 1 - i`.
    pub fn reflect(&self) -> LineConfig {
        LineConfig {
            positions: self.positions.iter().rev().map(|x| -x).collect(),
            source: self.source.map(|k| self.n() + 1 - k),
        }
    }

    pub fn translate(&self, d: &Scalar) -> LineConfig {
        LineConfig {
            positions: self.positions.iter().map(|x| x + d).collect(),
            source: self.source,
        }
    }

    /// Scale by a positive factor.
    pub fn scale(&self, lambda: &Scalar) -> LineConfig {
        assert!(lambda.is_positive(), "scale factor must be positive");
        LineConfig {
            positions: self.positions.iter().map(|x| x * lambda).collect(),
            source: self.source,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = LineDoc {
            kind: "line".into(),
            positions: self.positions.clone(),
            source: self.source,
        };
        serde_json::to_string(&doc).expect("line serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Scalar,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Connected undirected graph with positive edge weights and agents on distinct nodes.
///
/// Port `p` of node `x` is `adjacency(x)[p]`, i.e. ports follow the order in
/// which incident edges appear in the edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    agents: Vec<usize>,
    source: Option<usize>,
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<String, usize>,
}

impl WeightedGraph {
    /// `agents[id - 1]` is the start node of agent `id`.
    pub fn new(
        nodes: Vec<String>,
        edges: Vec<(usize, usize, Scalar)>,
        agents: Vec<usize>,
        source: Option<usize>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, name) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate node {name:?}")));
            }
        }
        let n = nodes.len();
        if n == 0 {
            return Err(Error::Invalid("graph has no nodes".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (e, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge {e} references an unknown node")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at {:?}", nodes[u])));
            }
            if !w.is_positive() {
                return Err(Error::Invalid(format!(
                    "edge {:?}-{:?} has non-positive weight {w}",
                    nodes[u], nodes[v]
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Invalid(format!(
                    "parallel edges between {:?} and {:?}",
                    nodes[u], nodes[v]
                )));
            }
            adj[u].push((v, e));
            adj[v].push((u, e));
            out.push(Edge { u, v, w });
        }
        let mut occupied = BTreeSet::new();
        for (i, &x) in agents.iter().enumerate() {
            if x >= n {
                return Err(Error::Invalid(format!("agent {} on unknown node", i + 1)));
            }
            if !occupied.insert(x) {
                return Err(Error::Invalid(format!(
                    "two agents start at node {:?}",
                    nodes[x]
                )));
            }
        }
        if let Some(s) = source {
            if s == 0 || s > agents.len() {
                return Err(Error::Invalid(format!("source {s} is not an agent")));
            }
        }
        let g = WeightedGraph { nodes, edges: out, agents, source, adj, index };
        if !g.is_connected() {
            return Err(Error::Invalid("graph is disconnected".into()));
        }
        Ok(g)
    }

    /// Path graph with one node per line position, named `v1..vn`.
    pub fn path_from_line(c: &LineConfig) -> WeightedGraph {
        let n = c.n();
        let nodes = (1..=n).map(|i| format!("v{i}")).collect();
        let edges = (1..n).map(|i| (i - 1, i, c.pos(i + 1) - c.pos(i))).collect();
        WeightedGraph::new(nodes, edges, (0..n).collect(), c.source())
            .expect("a sorted line is a valid path")
    }

    fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, x: usize) -> &str {
        &self.nodes[x]
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Incident `(neighbor, edge)` pairs in port order.
    pub fn adjacency(&self, x: usize) -> &[(usize, usize)] {
        &self.adj[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a].iter().find(|&&(y, _)| y == b).map(|&(_, e)| e)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    /// Start node of agent `id` (1-based).
    pub fn agent_node(&self, id: usize) -> usize {
        self.agents[id - 1]
    }

    pub fn agent_nodes(&self) -> &[usize] {
        &self.agents
    }

    pub fn agent_at(&self, x: usize) -> Option<usize> {
        self.agents.iter().position(|&y| y == x).map(|i| i + 1)
    }

    pub fn source(&self) -> Option<usize> {
        self.source
    }

    pub fn with_source(mut self, source: Option<usize>) -> Result<Self> {
        if let Some(s) = source {
            if s == 0 || s > self.agents.len() {
                return Err(Error::Invalid(format!("source {s} is not an agent")));
            }
        }
        self.source = source;
        Ok(self)
    }

    /// Same graph with every adjacency list permuted; `perm(x, deg)` returns
    /// the new port order of node `x` as a permutation of `0..deg`.
    pub fn relabel_ports(&self, mut perm: impl FnMut(usize, usize) -> Vec<usize>) -> WeightedGraph {
        let mut g = self.clone();
        for x in 0..g.adj.len() {
            let order = perm(x, g.adj[x].len());
            let old = std::mem::take(&mut g.adj[x]);
            g.adj[x] = order.into_iter().map(|p| old[p]).collect();
        }
        g
    }

    pub fn to_json_kind(&self, kind: &str) -> String {
        let doc = GraphDoc {
            kind: kind.into(),
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    u: self.nodes[e.u].clone(),
                    v: self.nodes[e.v].clone(),
                    w: e.w.clone(),
                })
                .collect(),
            agents: self
                .agents
                .iter()
                .enumerate()
                .map(|(i, &x)| AgentDoc { id: i + 1, node: self.nodes[x].clone() })
                .collect(),
            source: self.source,
        };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_kind("graph")
    }
}

/// A `WeightedGraph` known to be a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree(WeightedGraph);

impl WeightedTree {
    pub fn new(g: WeightedGraph) -> Result<Self> {
        if g.edges.len() + 1 != g.nodes.len() {
            return Err(Error::Invalid(format!(
                "a tree on {} nodes needs {} edges, got {}",
                g.nodes.len(),
                g.nodes.len() - 1,
                g.edges.len()
            )));
        }
        Ok(WeightedTree(g))
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.0
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.0
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.0.node_count()).filter(|&x| self.0.degree(x) <= 1).collect()
    }

    pub fn relabel_ports(&self, perm: impl FnMut(usize, usize) -> Vec<usize>) -> WeightedTree {
        WeightedTree(self.0.relabel_ports(perm))
    }

    pub fn to_json(&self) -> String {
        self.0.to_json_kind("tree")
    }
}

impl Deref for WeightedTree {
    type Target = WeightedGraph;
    fn deref(&self) -> &WeightedGraph {
        &self.0
    }
}

/// Checks that every leaf hosts an agent.
pub fn validate_tree_for_distributed(t: &WeightedTree) -> Result<()> {
    let bad: Vec<String> = t
        .leaves()
        .into_iter()
        .filter(|&x| t.agent_at(x).is_none())
        .map(|x| t.node_name(x).to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::LeafWithoutAgent(bad))
    }
}

/// A point of a network. Interior offsets are measured from `edge.u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Node(usize),
    Interior { edge: usize, offset: Scalar },
    /// A point of the line.
    Point(Scalar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Line(LineConfig),
    Graph(WeightedGraph),
    Tree(WeightedTree),
}

impl Instance {
    pub fn to_json(&self) -> String {
        match self {
            Instance::Line(c) => c.to_json(),
            Instance::Graph(g) => g.to_json(),
            Instance::Tree(t) => t.to_json(),
        }
    }

    pub fn as_graph(&self) -> Option<&WeightedGraph> {
        match self {
            Instance::Line(_) => None,
            Instance::Graph(g) => Some(g),
            Instance::Tree(t) => Some(t.graph()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDoc {
    kind: String,
    positions: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    u: String,
    v: String,
    w: Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    id: usize,
    node: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    kind: String,
    nodes: Vec<String>,
    edges: Vec<EdgeDoc>,
    agents: Vec<AgentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<usize>,
}

/// Parses and validates a line, graph or tree document.
pub fn load_configuration(text: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing string field \"kind\"".into()))?
        .to_string();
    match kind.as_str() {
        "line" => {
            let doc: LineDoc =
                serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Instance::Line(LineConfig::new(doc.positions)?.with_source(doc.source)?))
        }
        "graph" | "tree" => {
            let doc: GraphDoc =
                serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            let g = graph_from_doc(doc)?;
            if kind == "tree" {
                Ok(Instance::Tree(WeightedTree::new(g)?))
            } else {
                Ok(Instance::Graph(g))
            }
        }
        other => Err(Error::Parse(format!("unknown kind {other:?}"))),
    }
}

fn graph_from_doc(doc: GraphDoc) -> Result<WeightedGraph> {
    let index: HashMap<&str, usize> =
        doc.nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("unknown node {name:?}")))
    };
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        edges.push((lookup(&e.u)?, lookup(&e.v)?, e.w.clone()));
    }
    let k = doc.agents.len();
    let mut agents = vec![usize::MAX; k];
    for a in &doc.agents {
        if a.id == 0 || a.id > k {
            return Err(Error::Invalid(format!("agent ids must be 1..={k}, got {}", a.id)));
        }
        if agents[a.id - 1] != usize::MAX {
            return Err(Error::Invalid(format!("duplicate agent id {}", a.id)));
        }
        agents[a.id - 1] = lookup(&a.node)?;
    }
    WeightedGraph::new(doc.nodes, edges, agents, doc.source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sc;

    pub(crate) fn star123() -> WeightedTree {
        let text = r#"{"kind":"tree","nodes":["c","l1","l2","l3"],
            "edges":[{"u":"c","v":"l1","w":"1"},{"u":"c","v":"l2","w":"2"},{"u":"c","v":"l3","w":"3"}],
            "agents":[{"id":1,"node":"l1"},{"id":2,"node":"l2"},{"id":3,"node":"l3"}]}"#;
        match load_configuration(text).unwrap() {
            Instance::Tree(t) => t,
            _ => unreachable!(),
        }
    }

    fn path(agents: &[&str]) -> WeightedTree {
        let agents: Vec<String> = agents
            .iter()
            .enumerate()
            .map(|(i, a)| format!(r#"{{"id":{},"node":"{a}"}}"#, i + 1))
            .collect();
        let text = format!(
            r#"{{"kind":"tree","nodes":["a","b","c"],"edges":[{{"u":"a","v":"b","w":"1"}},{{"u":"b","v":"c","w":"1"}}],"agents":[{}]}}"#,
            agents.join(",")
        );
        match load_configuration(&text).unwrap() {
            Instance::Tree(t) => t,
            _ => unreachable!(),
        }
    }

    #[test]
    fn loads_line() {
        let inst = load_configuration(r#"{"kind":"line","positions":["0","4","8"]}"#).unwrap();
        match inst {
            Instance::Line(c) => {
                assert_eq!(c.n(), 3);
                assert_eq!(*c.pos(3), sc("8"));
            }
            _ => panic!("expected a line"),
        }
    }

    #[test]
    fn rejects_unsorted_line() {
        let err = load_configuration(r#"{"kind":"line","positions":["4","0"]}"#).unwrap_err();
        assert!(matches!(err, Error::Invalid(ref m) if m.contains("strictly increasing")));
    }

    #[test]
    fn loads_star() {
        let t = star123();
        assert_eq!(t.leaves().len(), 3);
        assert_eq!(t.agent_count(), 3);
        assert!(validate_tree_for_distributed(&t).is_ok());
    }

    #[test]
    fn distributed_validation() {
        assert!(validate_tree_for_distributed(&path(&["a", "c"])).is_ok());
        let err = validate_tree_for_distributed(&path(&["a"])).unwrap_err();
        assert_eq!(err, Error::LeafWithoutAgent(vec!["c".into()]));
    }

    #[test]
    fn rejects_bad_graphs() {
        let disconnected = r#"{"kind":"graph","nodes":["a","b","c"],"edges":[{"u":"a","v":"b","w":"1"}],"agents":[]}"#;
        assert!(load_configuration(disconnected).is_err());
        let dup = r#"{"kind":"graph","nodes":["a","b"],"edges":[{"u":"a","v":"b","w":"1"}],"agents":[{"id":1,"node":"a"},{"id":2,"node":"a"}]}"#;
        assert!(load_configuration(dup).is_err());
        let zero = r#"{"kind":"graph","nodes":["a","b"],"edges":[{"u":"a","v":"b","w":"0"}],"agents":[]}"#;
        assert!(load_configuration(zero).is_err());
        let cyc = r#"{"kind":"tree","nodes":["a","b","c"],"edges":[{"u":"a","v":"b","w":"1"},{"u":"b","v":"c","w":"1"},{"u":"c","v":"a","w":"1"}],"agents":[]}"#;
        assert!(load_configuration(cyc).is_err());
        assert!(matches!(load_configuration("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn round_trip() {
        let t = star123();
        let again = load_configuration(&t.to_json()).unwrap();
        assert_eq!(again, Instance::Tree(t));
        let c = LineConfig::new(vec![sc("1/3"), sc("2.5"), sc("7")]).unwrap();
        assert_eq!(load_configuration(&c.to_json()).unwrap(), Instance::Line(c));
    }
}
