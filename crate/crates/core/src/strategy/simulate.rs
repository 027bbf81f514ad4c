use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::{edge_coords, location_to_json, Network, Strategy};
use crate::error::{Error, Result};
use crate::model::Location;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meeting {
    pub time: Scalar,
    pub location: Location,
    pub agents: Vec<usize>,
}

/// Agent `agent` learned new information at `time`; `info` is its full set afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoEvent {
    pub time: Scalar,
    pub agent: usize,
    pub location: Location,
    pub info: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Vec<Location>,
    pub meetings: Vec<Meeting>,
    /// Path length per agent, indexed by `id - 1`.
    pub power: Vec<Scalar>,
    /// Final information set per agent.
    pub info: Vec<BTreeSet<usize>>,
    pub timeline: Vec<InfoEvent>,
}

impl Trace {
    pub fn agent_count(&self) -> usize {
        self.power.len()
    }

    pub fn to_json(&self, net: Network<'_>) -> Value {
        json!({
            "meetings": self.meetings.iter().map(|m| json!({
                "time": m.time.to_string(),
                "location": location_to_json(net, &m.location),
                "agents": m.agents,
            })).collect::<Vec<_>>(),
            "power": self.power.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "info": self.info.iter().map(|s| s.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            "timeline": self.timeline.iter().map(|e| json!({
                "time": e.time.to_string(),
                "agent": e.agent,
                "location": location_to_json(net, &e.location),
                "info": e.info,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Seg {
    Axis,
    Edge(usize),
}

/// Stationary place in canonical form: edge endpoints are always nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Place {
    Node(usize),
    On(Seg, Scalar),
}

#[derive(Clone, Debug)]
enum Kind {
    Still(Place),
    /// Coordinate `c0 + dir * (t - t0)` along `seg`.
    Move { seg: Seg, c0: Scalar, up: bool },
}

#[derive(Clone, Debug)]
struct Piece {
    t0: Scalar,
    t1: Option<Scalar>,
    kind: Kind,
}

impl Piece {
    fn seg_line(&self) -> Option<(Seg, Scalar, i8)> {
        match &self.kind {
            Kind::Still(Place::On(s, c)) => Some((*s, c.clone(), 0)),
            Kind::Still(Place::Node(_)) => None,
            Kind::Move { seg, c0, up } => {
                // intercept at t = 0
                if *up {
                    Some((*seg, c0 - &self.t0, 1))
                } else {
                    Some((*seg, c0 + &self.t0, -1))
                }
            }
        }
    }

    fn coord_at(&self, t: &Scalar) -> Scalar {
        match &self.kind {
            Kind::Still(Place::On(_, c)) => c.clone(),
            Kind::Still(Place::Node(_)) => unreachable!("nodes have no coordinate"),
            Kind::Move { c0, up, .. } => {
                if *up {
                    c0 + &(t - &self.t0)
                } else {
                    c0 - &(t - &self.t0)
                }
            }
        }
    }
}

enum TimeSet {
    Empty,
    Point(Scalar),
    All,
}

struct World<'a> {
    net: Network<'a>,
}

impl<'a> World<'a> {
    fn canonical(&self, loc: &Location) -> Result<Place> {
        match (self.net, loc) {
            (Network::Line(_), Location::Point(x)) => Ok(Place::On(Seg::Axis, x.clone())),
            (Network::Graph(g), Location::Node(v)) if *v < g.node_count() => Ok(Place::Node(*v)),
            (Network::Graph(g), Location::Interior { edge, offset }) if *edge < g.edges().len() => {
                let w = &g.edge(*edge).w;
                if !offset.is_positive() || offset >= w {
                    return Err(Error::OffNetwork(format!(
                        "offset {offset} outside the interior of edge {edge}"
                    )));
                }
                Ok(Place::On(Seg::Edge(*edge), offset.clone()))
            }
            _ => Err(Error::OffNetwork(format!("location {loc:?} is not in the network"))),
        }
    }

    fn place_on(&self, seg: Seg, c: Scalar) -> Place {
        if let (Network::Graph(g), Seg::Edge(e)) = (self.net, seg) {
            let ed = g.edge(e);
            if c.is_zero() {
                return Place::Node(ed.u);
            }
            if c == ed.w {
                return Place::Node(ed.v);
            }
        }
        Place::On(seg, c)
    }

    fn location(&self, p: &Place) -> Location {
        match p {
            Place::Node(v) => Location::Node(*v),
            Place::On(Seg::Axis, x) => Location::Point(x.clone()),
            Place::On(Seg::Edge(e), c) => Location::Interior { edge: *e, offset: c.clone() },
        }
    }

    fn place_at(&self, piece: &Piece, t: &Scalar) -> Place {
        match &piece.kind {
            Kind::Still(p) => p.clone(),
            Kind::Move { seg, .. } => self.place_on(*seg, piece.coord_at(t)),
        }
    }

    fn node_coord(&self, seg: Seg, v: usize) -> Option<Scalar> {
        match (self.net, seg) {
            (Network::Graph(g), Seg::Edge(e)) => {
                let ed = g.edge(e);
                if ed.u == v {
                    Some(Scalar::zero())
                } else if ed.v == v {
                    Some(ed.w.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn nodes_of(&self, piece: &Piece) -> Vec<usize> {
        match (&piece.kind, self.net) {
            (Kind::Still(Place::Node(v)), _) => vec![*v],
            (Kind::Move { seg: Seg::Edge(e), .. }, Network::Graph(g)) => {
                vec![g.edge(*e).u, g.edge(*e).v]
            }
            _ => Vec::new(),
        }
    }

    fn at_node(&self, piece: &Piece, v: usize) -> TimeSet {
        match &piece.kind {
            Kind::Still(Place::Node(x)) if *x == v => TimeSet::All,
            Kind::Move { seg, c0, up } => match self.node_coord(*seg, v) {
                Some(cv) => {
                    let dt = if *up { &cv - c0 } else { c0 - &cv };
                    if dt.is_negative() {
                        return TimeSet::Empty;
                    }
                    let t = &piece.t0 + &dt;
                    match &piece.t1 {
                        Some(t1) if &t > t1 => TimeSet::Empty,
                        _ => TimeSet::Point(t),
                    }
                }
                None => TimeSet::Empty,
            },
            _ => TimeSet::Empty,
        }
    }

    /// Earliest contact of two pieces within `[lo, hi]`, as an interval.
    fn contact(
        &self,
        a: &Piece,
        b: &Piece,
        lo: &Scalar,
        hi: &Option<Scalar>,
    ) -> Option<(Scalar, Option<Scalar>)> {
        let within = |t: &Scalar| t >= lo && hi.as_ref().is_none_or(|h| t <= h);
        if let (Some((sa, ia, da)), Some((sb, ib, db))) = (a.seg_line(), b.seg_line()) {
            if sa == sb {
                if da == db {
                    return (ia == ib).then(|| (lo.clone(), hi.clone()));
                }
                let t = (&ib - &ia) / Scalar::from_int(i64::from(da - db));
                return within(&t).then(|| (t.clone(), Some(t)));
            }
        }
        let nb = self.nodes_of(b);
        let mut best: Option<(Scalar, Option<Scalar>)> = None;
        for v in self.nodes_of(a) {
            if !nb.contains(&v) {
                continue;
            }
            let hit = match (self.at_node(a, v), self.at_node(b, v)) {
                (TimeSet::All, TimeSet::All) => Some((lo.clone(), hi.clone())),
                (TimeSet::All, TimeSet::Point(t)) | (TimeSet::Point(t), TimeSet::All) => {
                    within(&t).then(|| (t.clone(), Some(t)))
                }
                (TimeSet::Point(s), TimeSet::Point(t)) if s == t => {
                    within(&t).then(|| (t.clone(), Some(t)))
                }
                _ => None,
            };
            if let Some(h) = hit {
                if best.as_ref().is_none_or(|(s, _)| h.0 < *s) {
                    best = Some(h);
                }
            }
        }
        best
    }
}

struct Trajectory {
    pieces: Vec<Piece>,
    length: Scalar,
    /// `(time, cumulative length)` at the end of each move.
    marks: Vec<(Scalar, Scalar, Scalar)>,
}

fn build_trajectories(world: &World<'_>, s: &Strategy) -> Result<Vec<Trajectory>> {
    let n = world.net.agent_count();
    let mut per_agent: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, m) in s.moves.iter().enumerate() {
        if m.agent == 0 || m.agent > n {
            return Err(Error::Discontinuous {
                agent: m.agent,
                reason: "no such agent".into(),
            });
        }
        per_agent[m.agent - 1].push(i);
    }
    let mut out = Vec::with_capacity(n);
    for (a, idxs) in per_agent.iter_mut().enumerate() {
        let agent = a + 1;
        idxs.sort_by(|&x, &y| s.moves[x].depart.cmp(&s.moves[y].depart));
        let mut here = world.canonical(&world.net.start(agent))?;
        let mut now = Scalar::zero();
        let mut pieces = Vec::new();
        let mut length = Scalar::zero();
        let mut marks = Vec::new();
        for &i in idxs.iter() {
            let m = &s.moves[i];
            let from = world.canonical(&m.from)?;
            if from != here {
                return Err(Error::Discontinuous {
                    agent,
                    reason: format!("move at {} starts away from the agent's position", m.depart),
                });
            }
            if m.depart < now {
                return Err(Error::Discontinuous {
                    agent,
                    reason: format!("move at {} departs before time {now}", m.depart),
                });
            }
            let to = world.canonical(&m.to)?;
            let (seg, c0, c1) = match world.net {
                Network::Line(_) => match (&m.from, &m.to) {
                    (Location::Point(x), Location::Point(y)) => (Seg::Axis, x.clone(), y.clone()),
                    _ => unreachable!("canonical accepted only points"),
                },
                Network::Graph(g) => {
                    let (e, x, y) = edge_coords(g, &m.from, &m.to)?;
                    (Seg::Edge(e), x, y)
                }
            };
            let len = (&c1 - &c0).abs();
            if len.is_zero() {
                continue;
            }
            if m.depart > now {
                pieces.push(Piece {
                    t0: now.clone(),
                    t1: Some(m.depart.clone()),
                    kind: Kind::Still(here.clone()),
                });
            }
            let arrive = &m.depart + &len;
            let up = c1 > c0;
            marks.push((m.depart.clone(), arrive.clone(), length.clone()));
            length += &len;
            pieces.push(Piece {
                t0: m.depart.clone(),
                t1: Some(arrive.clone()),
                kind: Kind::Move { seg, c0, up },
            });
            now = arrive;
            here = to;
        }
        pieces.push(Piece { t0: now, t1: None, kind: Kind::Still(here) });
        out.push(Trajectory { pieces, length, marks });
    }
    Ok(out)
}

/// Candidate pairs whose trajectories share some part of the network.
fn candidate_pairs(world: &World<'_>, trajs: &[Trajectory]) -> Vec<(usize, usize)> {
    match world.net {
        Network::Line(_) => {
            let mut ext: Vec<(Scalar, Scalar, usize)> = trajs
                .iter()
                .enumerate()
                .map(|(i, tr)| {
                    let mut lo: Option<Scalar> = None;
                    let mut hi: Option<Scalar> = None;
                    let mut see = |c: Scalar| {
                        if lo.as_ref().is_none_or(|l| &c < l) {
                            lo = Some(c.clone());
                        }
                        if hi.as_ref().is_none_or(|h| &c > h) {
                            hi = Some(c);
                        }
                    };
                    for p in &tr.pieces {
                        match &p.kind {
                            Kind::Still(Place::On(_, c)) => see(c.clone()),
                            Kind::Move { .. } => {
                                see(p.coord_at(&p.t0));
                                see(p.coord_at(p.t1.as_ref().expect("moves end")));
                            }
                            Kind::Still(Place::Node(_)) => {}
                        }
                    }
                    (lo.expect("some piece"), hi.expect("some piece"), i)
                })
                .collect();
            ext.sort();
            let mut pairs = Vec::new();
            for i in 0..ext.len() {
                for j in i + 1..ext.len() {
                    if ext[j].0 > ext[i].1 {
                        break;
                    }
                    let (a, b) = (ext[i].2, ext[j].2);
                    pairs.push((a.min(b), a.max(b)));
                }
            }
            pairs.sort();
            pairs
        }
        Network::Graph(g) => {
            let mut by_node: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            let mut by_edge: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for (i, tr) in trajs.iter().enumerate() {
                for p in &tr.pieces {
                    match &p.kind {
                        Kind::Still(Place::Node(v)) => {
                            by_node.entry(*v).or_default().insert(i);
                        }
                        Kind::Still(Place::On(Seg::Edge(e), _)) => {
                            by_edge.entry(*e).or_default().insert(i);
                        }
                        Kind::Move { seg: Seg::Edge(e), .. } => {
                            by_edge.entry(*e).or_default().insert(i);
                            by_node.entry(g.edge(*e).u).or_default().insert(i);
                            by_node.entry(g.edge(*e).v).or_default().insert(i);
                        }
                        _ => {}
                    }
                }
            }
            let mut pairs = BTreeSet::new();
            for group in by_node.values().chain(by_edge.values()) {
                let v: Vec<usize> = group.iter().copied().collect();
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        pairs.insert((v[i], v[j]));
                    }
                }
            }
            pairs.into_iter().collect()
        }
    }
}

struct Contact {
    start: Scalar,
    end: Option<Scalar>,
    a: usize,
    b: usize,
    place: Place,
}

fn pair_contacts(world: &World<'_>, ta: &Trajectory, tb: &Trajectory, a: usize, b: usize) -> Vec<Contact> {
    let mut out: Vec<Contact> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < ta.pieces.len() && j < tb.pieces.len() {
        let pa = &ta.pieces[i];
        let pb = &tb.pieces[j];
        let lo = Scalar::max_of(&pa.t0, &pb.t0);
        let hi = match (&pa.t1, &pb.t1) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => Some(Scalar::min_of(x, y)),
        };
        if hi.as_ref().is_none_or(|h| &lo <= h) {
            if let Some((s, e)) = world.contact(pa, pb, &lo, &hi) {
                let merged = match out.last_mut() {
                    Some(last) if last.end.as_ref().is_some_and(|le| &s <= le) => {
                        last.end = match (&last.end, e.clone()) {
                            (_, None) => None,
                            (Some(le), Some(ne)) => Some(Scalar::max_of(le, &ne)),
                            (None, Some(_)) => None,
                        };
                        true
                    }
                    Some(last) if last.end.is_none() => true,
                    _ => false,
                };
                if !merged {
                    let place = world.place_at(pa, &s);
                    out.push(Contact { start: s, end: e, a, b, place });
                }
            }
        }
        // advance whichever piece ends first
        match (&pa.t1, &pb.t1) {
            (None, None) => break,
            (Some(_), None) => i += 1,
            (None, Some(_)) => j += 1,
            (Some(x), Some(y)) => {
                if x < y {
                    i += 1;
                } else if y < x {
                    j += 1;
                } else {
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn place_of_agent(world: &World<'_>, tr: &Trajectory, t: &Scalar) -> Place {
    let idx = tr
        .pieces
        .iter()
        .rposition(|p| &p.t0 <= t)
        .unwrap_or(0);
    world.place_at(&tr.pieces[idx], t)
}

/// Runs a strategy and records meetings, information flow and power use.
pub fn simulate(net: Network<'_>, s: &Strategy, budget: &Scalar) -> Result<Trace> {
    let world = World { net };
    let n = net.agent_count();
    let trajs = build_trajectories(&world, s)?;

    // earliest budget violation
    let mut violation: Option<(Scalar, usize)> = None;
    for (a, tr) in trajs.iter().enumerate() {
        if &tr.length > budget {
            let (depart, _, before) = tr
                .marks
                .iter()
                .find(|(d, arr, before)| {
                    let used_after = before + &(arr - d);
                    &used_after > budget
                })
                .expect("some move crosses the budget");
            let time = depart + &(budget - before);
            if violation.as_ref().is_none_or(|(t, _)| &time < t) {
                violation = Some((time, a + 1));
            }
        }
    }
    if let Some((time, agent)) = violation {
        return Err(Error::BudgetExceeded { agent, time });
    }

    let mut contacts: Vec<Contact> = Vec::new();
    for (a, b) in candidate_pairs(&world, &trajs) {
        contacts.extend(pair_contacts(&world, &trajs[a], &trajs[b], a, b));
    }
    contacts.sort_by(|x, y| x.start.cmp(&y.start).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));

    let mut info: Vec<BTreeSet<usize>> = (1..=n).map(|i| BTreeSet::from([i])).collect();
    let mut meetings = Vec::new();
    let mut timeline = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < contacts.len() {
        let t = contacts[k].start.clone();
        let first_new = k;
        while k < contacts.len() && contacts[k].start == t {
            active.push(k);
            k += 1;
        }
        active.retain(|&c| contacts[c].end.as_ref().is_none_or(|e| e >= &t));

        // meetings that begin now
        let mut fresh = Dsu::new(n);
        for c in &contacts[first_new..k] {
            fresh.union(c.a, c.b);
        }
        let mut groups: BTreeMap<usize, (BTreeSet<usize>, Place)> = BTreeMap::new();
        for c in &contacts[first_new..k] {
            let root = fresh.find(c.a);
            let entry = groups.entry(root).or_insert_with(|| (BTreeSet::new(), c.place.clone()));
            entry.0.insert(c.a + 1);
            entry.0.insert(c.b + 1);
        }
        for (_, (agents, place)) in groups {
            meetings.push(Meeting {
                time: t.clone(),
                location: world.location(&place),
                agents: agents.into_iter().collect(),
            });
        }

        // information exchange among everyone in contact at time t
        let mut dsu = Dsu::new(n);
        for &c in &active {
            dsu.union(contacts[c].a, contacts[c].b);
        }
        let mut comp: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &c in &active {
            for x in [contacts[c].a, contacts[c].b] {
                let r = dsu.find(x);
                comp.entry(r).or_default().extend(info[x].iter().copied());
            }
        }
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for &c in &active {
            touched.insert(contacts[c].a);
            touched.insert(contacts[c].b);
        }
        for x in touched {
            let union = &comp[&dsu.find(x)];
            if union.len() > info[x].len() {
                info[x] = union.clone();
                timeline.push(InfoEvent {
                    time: t.clone(),
                    agent: x + 1,
                    location: world.location(&place_of_agent(&world, &trajs[x], &t)),
                    info: info[x].iter().copied().collect(),
                });
            }
        }
    }

    Ok(Trace {
        start: (1..=n).map(|a| net.start(a)).collect(),
        meetings,
        power: trajs.into_iter().map(|t| t.length).collect(),
        info,
        timeline,
    })
}
