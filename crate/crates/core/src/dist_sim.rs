//! Event-driven execution of the distributed tree algorithms.
//!
//! Agents only see ports and their own used power. At a node an agent waits
//! until agents have come in through all ports but at most one. If every port
//! has been used the agents there stop; otherwise the present agent that has
//! used the least power leaves through the remaining port and the others stop.
//! A moving agent stops as soon as it meets another agent inside an edge.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph_approx::separation;
use crate::model::{validate_tree_for_distributed, Location, WeightedTree};
use crate::scalar::Scalar;
use crate::strategy::{location_to_json, Network, Strategy};

/// What happened to whom, in order of occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum DistEvent {
    Depart { time: Scalar, agent: usize, node: usize, port: usize },
    Arrive { time: Scalar, agent: usize, node: usize, port: usize },
    Meet { time: Scalar, agents: Vec<usize>, #[serde(skip)] location: Location },
    Stop { time: Scalar, agent: usize, #[serde(skip)] location: Location },
    Stranded { time: Scalar, agent: usize, #[serde(skip)] location: Location },
    Activate { time: Scalar, agent: usize, #[serde(skip)] location: Location },
}

impl DistEvent {
    pub fn time(&self) -> &Scalar {
        match self {
            DistEvent::Depart { time, .. }
            | DistEvent::Arrive { time, .. }
            | DistEvent::Meet { time, .. }
            | DistEvent::Stop { time, .. }
            | DistEvent::Stranded { time, .. }
            | DistEvent::Activate { time, .. } => time,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistOutcome {
    pub achieved: bool,
    pub power: Vec<Scalar>,
    /// First time the goal held, if it did.
    pub completion: Option<Scalar>,
    /// Time at which no agent moves any more.
    pub quiescence: Scalar,
    pub events: Vec<DistEvent>,
    /// The executed trajectories, one move per traversed edge piece.
    pub trajectories: Strategy,
    /// Final location of every agent.
    pub finals: Vec<Location>,
    /// Information held by every agent at the end.
    pub info: Vec<BTreeSet<usize>>,
    /// Set when some agent ran out of power inside an edge.
    pub stranded: Option<(usize, Scalar)>,
}

impl DistOutcome {
    pub fn max_power(&self) -> Scalar {
        self.power.iter().max().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn to_json(&self, t: &WeightedTree, with_trace: bool) -> Value {
        let net = Network::Graph(t.graph());
        let mut v = json!({
            "achieved": self.achieved,
            "power": self.power,
            "max_power": self.max_power(),
            "completion": self.completion,
            "quiescence": self.quiescence,
            "final_locations": self.finals.iter().map(|l| location_to_json(net, l)).collect::<Vec<_>>(),
        });
        if let Some((agent, time)) = &self.stranded {
            v["stranded"] = json!({ "agent": agent, "time": time });
        }
        if with_trace {
            let events: Vec<Value> = self
                .events
                .iter()
                .map(|e| {
                    let mut ev = serde_json::to_value(e).expect("event serializes");
                    let loc = match e {
                        DistEvent::Meet { location, .. }
                        | DistEvent::Stop { location, .. }
                        | DistEvent::Stranded { location, .. }
                        | DistEvent::Activate { location, .. } => Some(location),
                        _ => None,
                    };
                    if let Some(l) = loc {
                        ev["location"] = location_to_json(net, l);
                    }
                    if let Some(x) = ev.get("node").and_then(Value::as_u64) {
                        ev["node"] = json!(t.node_name(x as usize));
                    }
                    ev
                })
                .collect();
            v["events"] = Value::Array(events);
        }
        v
    }
}

#[derive(Clone, Debug)]
struct Leg {
    edge: usize,
    from: usize,
    to: usize,
    depart: Scalar,
}

#[derive(Clone, Debug)]
enum Mode {
    Waiting { node: usize, port: Option<usize>, since: Scalar },
    Moving(Leg),
    Stopped(Location),
}

#[derive(Clone, Debug)]
struct Agent {
    mode: Mode,
    used: Scalar,
    info: BTreeSet<usize>,
}

/// A traversed piece of an edge, as coordinates measured from `edge.u`.
#[derive(Clone, Debug)]
struct Piece {
    edge: usize,
    c0: Scalar,
    c1: Scalar,
}

struct Run<'a> {
    t: &'a WeightedTree,
    budget: Scalar,
    agents: Vec<Agent>,
    used_ports: Vec<BTreeSet<usize>>,
    events: Vec<DistEvent>,
    moves: Strategy,
    pieces: Vec<Vec<Piece>>,
    completion: Option<Scalar>,
    stranded: Option<(usize, Scalar)>,
}

fn port_of(t: &WeightedTree, node: usize, edge: usize) -> usize {
    t.adjacency(node).iter().position(|&(_, e)| e == edge).expect("edge is incident")
}

impl<'a> Run<'a> {
    fn coord(&self, node: usize, edge: usize) -> Scalar {
        if self.t.edge(edge).u == node {
            Scalar::zero()
        } else {
            self.t.edge(edge).w.clone()
        }
    }

    /// Edge coordinate of a mover at time `time`.
    fn coord_at(&self, leg: &Leg, time: &Scalar) -> Scalar {
        let s = time - &leg.depart;
        if self.t.edge(leg.edge).u == leg.from {
            s
        } else {
            &self.t.edge(leg.edge).w - &s
        }
    }

    fn location_on(&self, edge: usize, c: Scalar) -> Location {
        let e = self.t.edge(edge);
        if c.is_zero() {
            Location::Node(e.u)
        } else if c == e.w {
            Location::Node(e.v)
        } else {
            Location::Interior { edge, offset: c }
        }
    }

    fn n(&self) -> usize {
        self.agents.len()
    }

    fn note_full_info(&mut self, time: &Scalar) {
        if self.completion.is_none() && self.agents.iter().any(|a| a.info.len() == self.n()) {
            self.completion = Some(time.clone());
        }
    }

    /// Ends the current leg of agent `i` at time `time`, recording the move.
    fn end_leg(&mut self, i: usize, time: &Scalar) -> Location {
        let Mode::Moving(leg) = self.agents[i].mode.clone() else {
            unreachable!("only movers end legs")
        };
        let c0 = self.coord(leg.from, leg.edge);
        let c1 = self.coord_at(&leg, time);
        let loc = self.location_on(leg.edge, c1.clone());
        let dist = time - &leg.depart;
        self.agents[i].used = &self.agents[i].used + &dist;
        if dist.is_positive() {
            self.moves.push(i + 1, leg.depart.clone(), Location::Node(leg.from), loc.clone());
            self.pieces[i].push(Piece { edge: leg.edge, c0, c1 });
        }
        loc
    }

    fn union_info(&mut self, group: &[usize]) {
        let all: BTreeSet<usize> = group.iter().flat_map(|&i| self.agents[i].info.iter().copied()).collect();
        for &i in group {
            self.agents[i].info = all.clone();
        }
    }

    /// Agents (by index) resting at `loc`.
    fn resting_at(&self, loc: &Location) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| match &self.agents[i].mode {
                Mode::Waiting { node, .. } => *loc == Location::Node(*node),
                Mode::Stopped(l) => l == loc,
                Mode::Moving(_) => false,
            })
            .collect()
    }

    fn apply_rule(&mut self, node: usize, time: &Scalar) {
        let waiting: Vec<usize> = (0..self.n())
            .filter(|&i| matches!(self.agents[i].mode, Mode::Waiting { node: x, .. } if x == node))
            .collect();
        if waiting.is_empty() {
            return;
        }
        let deg = self.t.degree(node);
        let unused: Vec<usize> = (0..deg).filter(|p| !self.used_ports[node].contains(p)).collect();
        if unused.len() >= 2 {
            return;
        }
        let leader = if unused.len() == 1 {
            waiting.iter().copied().min_by(|&a, &b| {
                let key = |i: usize| match &self.agents[i].mode {
                    Mode::Waiting { port, since, .. } => (self.agents[i].used.clone(), *port, since.clone()),
                    _ => unreachable!(),
                };
                key(a).cmp(&key(b))
            })
        } else {
            None
        };
        for &i in &waiting {
            if Some(i) == leader {
                let port = unused[0];
                let (to, edge) = self.t.adjacency(node)[port];
                self.agents[i].mode = Mode::Moving(Leg { edge, from: node, to, depart: time.clone() });
                self.events.push(DistEvent::Depart { time: time.clone(), agent: i + 1, node, port });
            } else {
                self.agents[i].mode = Mode::Stopped(Location::Node(node));
                self.events.push(DistEvent::Stop { time: time.clone(), agent: i + 1, location: Location::Node(node) });
            }
        }
    }

    /// Earliest time at which mover `i` arrives, meets someone or runs dry, with the kind.
    fn next_event(&self, i: usize) -> (Scalar, Kind) {
        let Mode::Moving(leg) = &self.agents[i].mode else { unreachable!() };
        let w = &self.t.edge(leg.edge).w;
        let arrival = &leg.depart + w;
        let dry = &leg.depart + &(&self.budget - &self.agents[i].used);
        let mut best = (arrival.clone(), Kind::Arrive);
        let start = self.coord(leg.from, leg.edge);
        let dir_up = start.is_zero();
        for (j, other) in self.agents.iter().enumerate() {
            if j == i {
                continue;
            }
            let meet = match &other.mode {
                Mode::Moving(ol) if ol.edge == leg.edge && ol.from != leg.from => {
                    Some((w + &leg.depart + &ol.depart).half())
                }
                Mode::Stopped(Location::Interior { edge, offset }) if *edge == leg.edge => {
                    let d = if dir_up { offset.clone() } else { w - offset };
                    Some(&leg.depart + &d)
                }
                _ => None,
            };
            if let Some(m) = meet {
                if m < best.0 {
                    best = (m, Kind::Meet);
                }
            }
        }
        if dry < best.0 {
            best = (dry, Kind::Dry);
        }
        best
    }

    fn run_phase_one(&mut self) -> Scalar {
        let zero = Scalar::zero();
        for node in 0..self.t.node_count() {
            self.apply_rule(node, &zero);
        }
        self.note_full_info(&zero);
        let mut now = zero;
        loop {
            let movers: Vec<usize> = (0..self.n()).filter(|&i| matches!(self.agents[i].mode, Mode::Moving(_))).collect();
            if movers.is_empty() {
                break;
            }
            let evs: Vec<(usize, Scalar, Kind)> = movers
                .iter()
                .map(|&i| {
                    let (t, k) = self.next_event(i);
                    (i, t, k)
                })
                .collect();
            let time = evs.iter().map(|e| e.1.clone()).min().expect("movers exist");
            now = time.clone();
            let due: Vec<(usize, Kind)> = evs.into_iter().filter(|e| e.1 == time).map(|e| (e.0, e.2)).collect();

            // meetings inside edges
            let meeting: Vec<usize> = due.iter().filter(|e| e.1 == Kind::Meet).map(|e| e.0).collect();
            let mut spots: Vec<Location> = Vec::new();
            for &i in &meeting {
                let loc = self.end_leg(i, &time);
                self.agents[i].mode = Mode::Stopped(loc.clone());
                if !spots.contains(&loc) {
                    spots.push(loc);
                }
            }
            for loc in &spots {
                let group = self.resting_at(loc);
                self.union_info(&group);
                self.events.push(DistEvent::Meet {
                    time: time.clone(),
                    agents: group.iter().map(|i| i + 1).collect(),
                    location: loc.clone(),
                });
                for &i in &group {
                    if meeting.contains(&i) {
                        self.events.push(DistEvent::Stop { time: time.clone(), agent: i + 1, location: loc.clone() });
                    }
                }
            }

            // arrivals
            let mut touched: Vec<usize> = Vec::new();
            for &(i, k) in &due {
                if k != Kind::Arrive {
                    continue;
                }
                let Mode::Moving(leg) = self.agents[i].mode.clone() else { unreachable!() };
                self.end_leg(i, &time);
                let port = port_of(self.t, leg.to, leg.edge);
                self.used_ports[leg.to].insert(port);
                self.agents[i].mode = Mode::Waiting { node: leg.to, port: Some(port), since: time.clone() };
                self.events.push(DistEvent::Arrive { time: time.clone(), agent: i + 1, node: leg.to, port });
                if !touched.contains(&leg.to) {
                    touched.push(leg.to);
                }
            }
            touched.sort();
            for &node in &touched {
                let group = self.resting_at(&Location::Node(node));
                self.union_info(&group);
            }

            // depletion inside an edge
            for &(i, k) in &due {
                if k != Kind::Dry {
                    continue;
                }
                let loc = self.end_leg(i, &time);
                self.agents[i].mode = Mode::Stopped(loc.clone());
                self.events.push(DistEvent::Stranded { time: time.clone(), agent: i + 1, location: loc });
                if self.stranded.is_none() {
                    self.stranded = Some((i + 1, time.clone()));
                }
            }

            for &node in &touched {
                self.apply_rule(node, &time);
            }
            self.note_full_info(&time);
        }
        now
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Arrive,
    Meet,
    Dry,
}

fn start<'a>(t: &'a WeightedTree, budget: &Scalar) -> Run<'a> {
    let n = t.agent_count();
    let agents = (0..n)
        .map(|i| Agent {
            mode: Mode::Waiting { node: t.agent_node(i + 1), port: None, since: Scalar::zero() },
            used: Scalar::zero(),
            info: BTreeSet::from([i + 1]),
        })
        .collect();
    Run {
        t,
        budget: budget.clone(),
        agents,
        used_ports: vec![BTreeSet::new(); t.node_count()],
        events: Vec::new(),
        moves: Strategy::new(),
        pieces: vec![Vec::new(); n],
        completion: None,
        stranded: None,
    }
}

/// Runs the distributed convergecast algorithm with the given per-agent budget.
pub fn run_unknown_tree(t: &WeightedTree, budget: &Scalar) -> Result<DistOutcome> {
    validate_tree_for_distributed(t)?;
    if t.agent_count() == 0 {
        return Err(Error::Invalid("tree has no agents".into()));
    }
    let mut run = start(t, budget);
    let quiescence = run.run_phase_one();
    Ok(DistOutcome {
        achieved: run.completion.is_some() && run.stranded.is_none(),
        power: run.agents.iter().map(|a| a.used.clone()).collect(),
        completion: run.completion.clone(),
        quiescence,
        events: run.events,
        trajectories: run.moves,
        finals: run.agents.iter().map(run_final).collect(),
        info: run.agents.iter().map(|a| a.info.clone()).collect(),
        stranded: run.stranded,
    })
}

fn run_final(a: &Agent) -> Location {
    match &a.mode {
        Mode::Waiting { node, .. } => Location::Node(*node),
        Mode::Stopped(l) => l.clone(),
        Mode::Moving(_) => unreachable!("the run has settled"),
    }
}

/// Distance along a reversed phase-one path at which it passes `loc`, if it does.
fn offset_on_path(t: &WeightedTree, pieces: &[Piece], loc: &Location) -> Option<Scalar> {
    let mut walked = Scalar::zero();
    for p in pieces.iter().rev() {
        // walking from c1 back to c0
        let e = t.edge(p.edge);
        let hit = match loc {
            Location::Node(v) if *v == e.u || *v == e.v => {
                let c = if *v == e.u { Scalar::zero() } else { e.w.clone() };
                between(&c, &p.c0, &p.c1).then_some(c)
            }
            Location::Interior { edge, offset } if *edge == p.edge => {
                between(offset, &p.c0, &p.c1).then(|| offset.clone())
            }
            _ => None,
        };
        if let Some(c) = hit {
            return Some(&walked + &(&c - &p.c1).abs());
        }
        walked += (&p.c1 - &p.c0).abs();
    }
    None
}

fn between(x: &Scalar, a: &Scalar, b: &Scalar) -> bool {
    (a <= x && x <= b) || (b <= x && x <= a)
}

/// Convergecast followed by backtracking: agents holding all information walk
/// their phase-one path in reverse and wake every agent they pass, which then
/// backtracks as well.
pub fn run_distributed_broadcast(t: &WeightedTree, source: usize, budget: &Scalar) -> Result<DistOutcome> {
    if source == 0 || source > t.agent_count() {
        return Err(Error::Precondition(format!("source {source} is not an agent")));
    }
    if t.degree(t.agent_node(source)) > 1 {
        return Err(Error::Precondition(format!("source {source} does not start at a leaf")));
    }
    validate_tree_for_distributed(t)?;
    let mut run = start(t, budget);
    let t1 = run.run_phase_one();
    let n = run.n();
    let finals: Vec<Location> = run.agents.iter().map(run_final).collect();
    let lengths: Vec<Scalar> = run
        .pieces
        .iter()
        .map(|ps| ps.iter().map(|p| (&p.c1 - &p.c0).abs()).sum())
        .collect();

    // earliest activation time of every agent, settled in increasing order
    let mut act: Vec<Option<Scalar>> = (0..n)
        .map(|i| (run.agents[i].info.len() == n).then(|| t1.clone()))
        .collect();
    let mut settled = vec![false; n];
    loop {
        let next = (0..n)
            .filter(|&i| !settled[i] && act[i].is_some())
            .min_by(|&a, &b| act[a].cmp(&act[b]).then(a.cmp(&b)));
        let Some(x) = next else { break };
        settled[x] = true;
        let tx = act[x].clone().expect("selected agents are active");
        run.events.push(DistEvent::Activate { time: tx.clone(), agent: x + 1, location: finals[x].clone() });
        for y in 0..n {
            if settled[y] {
                continue;
            }
            if let Some(d) = offset_on_path(t, &run.pieces[x], &finals[y]) {
                let cand = &tx + &d;
                if act[y].as_ref().is_none_or(|cur| &cand < cur) {
                    act[y] = Some(cand);
                }
            }
        }
    }

    let mut power = Vec::with_capacity(n);
    let mut all_informed = true;
    let mut completion = Scalar::zero();
    for i in 0..n {
        let used = &run.agents[i].used;
        match &act[i] {
            Some(ti) => {
                let back = lengths[i].clone();
                let total = used + &back;
                if &total > budget
                    && run.stranded.is_none() {
                        run.stranded = Some((i + 1, ti + &(budget - used)));
                    }
                completion = Scalar::max_of(&completion, &(ti + &back));
                // reversed legs, one move per piece
                let mut clock = ti.clone();
                for p in run.pieces[i].clone().iter().rev() {
                    let from = run.location_on(p.edge, p.c1.clone());
                    let to = run.location_on(p.edge, p.c0.clone());
                    run.moves.push(i + 1, clock.clone(), from, to);
                    clock += (&p.c1 - &p.c0).abs();
                }
                run.agents[i].info = (1..=n).collect();
                power.push(total);
            }
            None => {
                all_informed = false;
                power.push(used.clone());
            }
        }
    }
    let achieved = all_informed && run.stranded.is_none() && run.agents.iter().all(|a| a.info.contains(&source));
    Ok(DistOutcome {
        achieved,
        power,
        completion: achieved.then_some(completion.clone()),
        quiescence: completion,
        events: run.events,
        trajectories: run.moves,
        finals: (0..n).map(|i| Location::Node(t.agent_node(i + 1))).collect(),
        info: run.agents.iter().map(|a| a.info.clone()).collect(),
        stranded: run.stranded,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompetitiveReport {
    pub max_power: Scalar,
    pub separation: Scalar,
    /// `max_power / (separation / 2)`, an upper bound on the competitive ratio.
    pub ratio: Scalar,
}

/// Runs the convergecast algorithm with budget `D(T, A)` and compares its
/// power to the lower bound `D / 2` on the optimum.
pub fn competitive_report(t: &WeightedTree) -> Result<CompetitiveReport> {
    let d = separation(t.graph(), t.agent_nodes())?;
    let out = run_unknown_tree(t, &d)?;
    if !out.achieved {
        return Err(Error::Infeasible("convergecast failed within the separation budget".into()));
    }
    let max_power = out.max_power();
    if max_power > d {
        return Err(Error::Infeasible(format!("used {max_power} above the separation {d}")));
    }
    let ratio = max_power.twice() / &d;
    Ok(CompetitiveReport { max_power, separation: d, ratio })
}
