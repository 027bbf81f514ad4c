//! Timed movement strategies, their continuous-time simulation and verification.

mod simulate;
mod verify;

use serde::{Deserialize, Serialize};

pub use simulate::{simulate, InfoEvent, Meeting, Trace};
pub use verify::{max_power_used, verify_broadcast, verify_convergecast, ConvergecastWitness};

use crate::error::{Error, Result};
use crate::model::{LineConfig, Location, WeightedGraph};
use crate::scalar::Scalar;

/// A unit-speed move of one agent along a single edge (or along the line).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedMove {
    pub agent: usize,
    pub depart: Scalar,
    pub from: Location,
    pub to: Location,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    pub moves: Vec<TimedMove>,
}

impl Strategy {
    pub fn new() -> Self {
        Strategy::default()
    }

    pub fn push(&mut self, agent: usize, depart: Scalar, from: Location, to: Location) {
        self.moves.push(TimedMove { agent, depart, from, to });
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }
}

/// The network a strategy runs on.
#[derive(Clone, Copy, Debug)]
pub enum Network<'a> {
    Line(&'a LineConfig),
    Graph(&'a WeightedGraph),
}

impl<'a> Network<'a> {
    pub fn agent_count(&self) -> usize {
        match self {
            Network::Line(c) => c.n(),
            Network::Graph(g) => g.agent_count(),
        }
    }

    pub fn start(&self, agent: usize) -> Location {
        match self {
            Network::Line(c) => Location::Point(c.pos(agent).clone()),
            Network::Graph(g) => Location::Node(g.agent_node(agent)),
        }
    }

    /// Length of the straight move between two locations on a common edge.
    pub fn move_length(&self, from: &Location, to: &Location) -> Result<Scalar> {
        match self {
            Network::Line(_) => match (from, to) {
                (Location::Point(a), Location::Point(b)) => Ok((b - a).abs()),
                _ => Err(Error::OffNetwork("line moves need point locations".into())),
            },
            Network::Graph(g) => {
                let (_, a, b) = edge_coords(g, from, to)?;
                Ok((b - a).abs())
            }
        }
    }
}

/// Finds the edge shared by two graph locations and their coordinates along it.
/// A move between two equal nodes is reported on edge `usize::MAX` at coordinate 0.
pub(crate) fn edge_coords(
    g: &WeightedGraph,
    from: &Location,
    to: &Location,
) -> Result<(usize, Scalar, Scalar)> {
    let coord = |e: usize, x: usize| -> Option<Scalar> {
        let ed = g.edge(e);
        if ed.u == x {
            Some(Scalar::zero())
        } else if ed.v == x {
            Some(ed.w.clone())
        } else {
            None
        }
    };
    let check_interior = |e: usize, o: &Scalar| -> Result<()> {
        if e >= g.edges().len() {
            return Err(Error::OffNetwork(format!("unknown edge {e}")));
        }
        if !o.is_positive() || o >= &g.edge(e).w {
            return Err(Error::OffNetwork(format!("offset {o} outside the interior of edge {e}")));
        }
        Ok(())
    };
    match (from, to) {
        (Location::Node(a), Location::Node(b)) => {
            if a == b {
                return Ok((usize::MAX, Scalar::zero(), Scalar::zero()));
            }
            let e = g.edge_between(*a, *b).ok_or_else(|| {
                Error::OffNetwork(format!(
                    "no edge between {:?} and {:?}",
                    g.node_name(*a),
                    g.node_name(*b)
                ))
            })?;
            Ok((e, coord(e, *a).unwrap(), coord(e, *b).unwrap()))
        }
        (Location::Node(a), Location::Interior { edge, offset }) => {
            check_interior(*edge, offset)?;
            let ca = coord(*edge, *a)
                .ok_or_else(|| Error::OffNetwork(format!("edge {edge} does not touch node {a}")))?;
            Ok((*edge, ca, offset.clone()))
        }
        (Location::Interior { edge, offset }, Location::Node(b)) => {
            check_interior(*edge, offset)?;
            let cb = coord(*edge, *b)
                .ok_or_else(|| Error::OffNetwork(format!("edge {edge} does not touch node {b}")))?;
            Ok((*edge, offset.clone(), cb))
        }
        (
            Location::Interior { edge: e1, offset: o1 },
            Location::Interior { edge: e2, offset: o2 },
        ) => {
            check_interior(*e1, o1)?;
            check_interior(*e2, o2)?;
            if e1 != e2 {
                return Err(Error::OffNetwork("interior points on different edges".into()));
            }
            Ok((*e1, o1.clone(), o2.clone()))
        }
        _ => Err(Error::OffNetwork("line point used on a graph".into())),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub(crate) enum LocDoc {
    Node { node: String },
    Interior { edge: [String; 2], offset: Scalar },
    Point { x: Scalar },
}

#[derive(Serialize, Deserialize)]
struct MoveDoc {
    agent: usize,
    depart: Scalar,
    from: LocDoc,
    to: LocDoc,
}

#[derive(Serialize, Deserialize)]
struct StrategyDoc {
    moves: Vec<MoveDoc>,
}

pub(crate) fn loc_to_doc(net: Network<'_>, loc: &Location) -> LocDoc {
    match (net, loc) {
        (_, Location::Point(x)) => LocDoc::Point { x: x.clone() },
        (Network::Graph(g), Location::Node(v)) => LocDoc::Node { node: g.node_name(*v).into() },
        (Network::Graph(g), Location::Interior { edge, offset }) => {
            let e = g.edge(*edge);
            LocDoc::Interior {
                edge: [g.node_name(e.u).into(), g.node_name(e.v).into()],
                offset: offset.clone(),
            }
        }
        (Network::Line(_), other) => panic!("graph location {other:?} on a line"),
    }
}

fn loc_from_doc(net: Network<'_>, doc: LocDoc) -> Result<Location> {
    match (net, doc) {
        (Network::Line(_), LocDoc::Point { x }) => Ok(Location::Point(x)),
        (Network::Line(_), _) => Err(Error::Parse("line strategies use {\"x\": ...} locations".into())),
        (Network::Graph(_), LocDoc::Point { .. }) => {
            Err(Error::Parse("graph strategies cannot use {\"x\": ...} locations".into()))
        }
        (Network::Graph(g), LocDoc::Node { node }) => g
            .node_index(&node)
            .map(Location::Node)
            .ok_or_else(|| Error::Parse(format!("unknown node {node:?}"))),
        (Network::Graph(g), LocDoc::Interior { edge: [a, b], offset }) => {
            let ia = g.node_index(&a).ok_or_else(|| Error::Parse(format!("unknown node {a:?}")))?;
            let ib = g.node_index(&b).ok_or_else(|| Error::Parse(format!("unknown node {b:?}")))?;
            let e = g
                .edge_between(ia, ib)
                .ok_or_else(|| Error::Parse(format!("no edge {a:?}-{b:?}")))?;
            let w = &g.edge(e).w;
            if !offset.is_positive() || &offset >= w {
                return Err(Error::Parse(format!("offset {offset} not inside edge {a:?}-{b:?}")));
            }
            let offset = if g.edge(e).u == ia { offset } else { w - &offset };
            Ok(Location::Interior { edge: e, offset })
        }
    }
}

pub fn strategy_to_json(net: Network<'_>, s: &Strategy) -> String {
    let doc = StrategyDoc {
        moves: s
            .moves
            .iter()
            .map(|m| MoveDoc {
                agent: m.agent,
                depart: m.depart.clone(),
                from: loc_to_doc(net, &m.from),
                to: loc_to_doc(net, &m.to),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("strategy serializes")
}

pub fn strategy_from_json(net: Network<'_>, text: &str) -> Result<Strategy> {
    let doc: StrategyDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = Strategy::new();
    for m in doc.moves {
        s.push(m.agent, m.depart, loc_from_doc(net, m.from)?, loc_from_doc(net, m.to)?);
    }
    Ok(s)
}

pub fn location_to_json(net: Network<'_>, loc: &Location) -> serde_json::Value {
    serde_json::to_value(loc_to_doc(net, loc)).expect("location serializes")
}
