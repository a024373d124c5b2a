//! Tours, tour graphs and tour trees.
//!
//! A tour is an abstract closed 1-D curve of length `l` traversed at unit
//! speed, so lengths, positions and travel times share one unit. Positions
//! live in `[0, l)` and increase in the counter-clockwise direction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for comparing times and positions.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TourId(pub u32);

impl fmt::Display for TourId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Cw,
    Ccw,
}

impl Direction {
    /// Both directions, clockwise first (the tie-break order).
    pub const BOTH: [Direction; 2] = [Direction::Cw, Direction::Ccw];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Half-open sensing interval `[start, end)` in the counter-clockwise
/// direction, with `0 <= start < end <= length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensingArc {
    pub start: f64,
    pub end: f64,
}

/// `x mod m` mapped into `[0, m)`.
pub(crate) fn wrap(x: f64, m: f64) -> f64 {
    let mut r = x % m;
    if r < 0.0 {
        r += m;
    }
    if r >= m {
        r -= m;
    }
    // values within EPS of a full turn collapse to zero
    if m - r < EPS {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    id: TourId,
    length: f64,
    sensing: Vec<SensingArc>,
    meetings: BTreeMap<TourId, f64>,
    base: Option<f64>,
}

impl Tour {
    /// A fully sensed tour without meeting points.
    pub fn new(id: TourId, length: f64) -> Result<Tour> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidTour {
                tour: id,
                reason: format!("length must be positive, got {length}"),
            });
        }
        Ok(Tour {
            id,
            length,
            sensing: vec![SensingArc {
                start: 0.0,
                end: length,
            }],
            meetings: BTreeMap::new(),
            base: None,
        })
    }

    /// Replaces the sensing set. Each `(start, end)` is a CCW interval;
    /// `start > end` wraps through the origin and `start == end` is empty.
    pub fn with_sensing(mut self, arcs: &[(f64, f64)]) -> Result<Tour> {
        let mut pieces = Vec::new();
        for &(a, b) in arcs {
            for x in [a, b] {
                if !(0.0..=self.length).contains(&x) {
                    return Err(Error::PositionOutOfRange {
                        tour: self.id,
                        position: x,
                        length: self.length,
                    });
                }
            }
            if a < b {
                pieces.push(SensingArc { start: a, end: b });
            } else if a > b {
                if a < self.length {
                    pieces.push(SensingArc {
                        start: a,
                        end: self.length,
                    });
                }
                if b > 0.0 {
                    pieces.push(SensingArc { start: 0.0, end: b });
                }
            }
        }
        pieces.sort_by(|x, y| x.start.total_cmp(&y.start));
        let mut merged: Vec<SensingArc> = Vec::new();
        for p in pieces {
            match merged.last_mut() {
                Some(last) if p.start <= last.end + EPS => last.end = last.end.max(p.end),
                _ => merged.push(p),
            }
        }
        self.sensing = merged;
        Ok(self)
    }

    /// Removes all sensing locations; the tour only relays data.
    pub fn relay_only(mut self) -> Tour {
        self.sensing.clear();
        self
    }

    pub fn with_meeting(mut self, neighbor: TourId, position: f64) -> Result<Tour> {
        self.set_meeting(neighbor, position)?;
        Ok(self)
    }

    pub fn with_base(mut self, position: f64) -> Result<Tour> {
        self.check(position)?;
        self.base = Some(position);
        Ok(self)
    }

    pub(crate) fn set_meeting(&mut self, neighbor: TourId, position: f64) -> Result<()> {
        self.check(position)?;
        if neighbor == self.id {
            return Err(Error::InvalidTour {
                tour: self.id,
                reason: "meeting point with itself".into(),
            });
        }
        self.meetings.insert(neighbor, position);
        Ok(())
    }

    pub(crate) fn clear_meetings(&mut self) {
        self.meetings.clear();
    }

    pub(crate) fn retain_meetings(&mut self, keep: impl Fn(TourId) -> bool) {
        self.meetings.retain(|k, _| keep(*k));
    }

    fn check(&self, p: f64) -> Result<()> {
        if p.is_finite() && p >= 0.0 && p < self.length {
            Ok(())
        } else {
            Err(Error::PositionOutOfRange {
                tour: self.id,
                position: p,
                length: self.length,
            })
        }
    }

    pub fn id(&self) -> TourId {
        self.id
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn sensing_arcs(&self) -> &[SensingArc] {
        &self.sensing
    }

    pub fn senses(&self) -> bool {
        !self.sensing.is_empty()
    }

    pub fn is_fully_sensed(&self) -> bool {
        self.sensing.len() == 1 && self.sensing[0].start <= EPS && self.sensing[0].end >= self.length - EPS
    }

    pub fn meetings(&self) -> &BTreeMap<TourId, f64> {
        &self.meetings
    }

    pub fn meeting(&self, neighbor: TourId) -> Option<f64> {
        self.meetings.get(&neighbor).copied()
    }

    pub fn base(&self) -> Option<f64> {
        self.base
    }

    /// Whether `p` lies in a (half-open) sensing arc.
    pub fn is_sensed(&self, p: f64) -> bool {
        self.sensing.iter().any(|a| p >= a.start - EPS && p < a.end - EPS)
    }

    /// Whether `p` lies in the closure of a sensing arc.
    pub fn is_sensed_closed(&self, p: f64) -> bool {
        self.sensing
            .iter()
            .any(|a| (p >= a.start - EPS && p <= a.end + EPS) || (a.end >= self.length - EPS && p <= EPS))
    }

    /// Time to travel from `p` to `q` in direction `d` without stopping.
    pub fn travel_time(&self, p: f64, q: f64, d: Direction) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.arc(p, q, d))
    }

    pub(crate) fn arc(&self, p: f64, q: f64, d: Direction) -> f64 {
        match d {
            Direction::Ccw => wrap(q - p, self.length),
            Direction::Cw => wrap(p - q, self.length),
        }
    }

    /// Least time after leaving `p` in direction `d` at which a sensing
    /// location is reached. Arcs are reached at their closure, so moving
    /// clockwise reaches `[a, b)` after `(p - b) mod l`.
    pub fn first_sensing_offset(&self, p: f64, d: Direction) -> Result<f64> {
        self.check(p)?;
        if self.sensing.is_empty() {
            return Err(Error::NoSensing(self.id));
        }
        Ok(self.sensing_offset(p, d))
    }

    pub(crate) fn sensing_offset(&self, p: f64, d: Direction) -> f64 {
        if self.is_sensed(p) {
            return 0.0;
        }
        self.sensing
            .iter()
            .map(|a| match d {
                Direction::Ccw => wrap(a.start - p, self.length),
                Direction::Cw => wrap(p - a.end, self.length),
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Delay contribution of data captured on this tour when the robot
    /// leaves `start` in direction `d` and hands the data over on return.
    /// Relay-only tours contribute nothing.
    pub fn own_delay(&self, start: f64, d: Direction) -> f64 {
        if self.sensing.is_empty() {
            0.0
        } else {
            self.length - self.sensing_offset(start, d)
        }
    }
}

/// Unordered pair stored with the smaller id first.
pub fn edge_key(a: TourId, b: TourId) -> (TourId, TourId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RootMissing(TourId),
    MissingBase(TourId),
    BaseOffRoot(TourId),
    UnknownEndpoint { edge: (TourId, TourId) },
    MissingMeeting { tour: TourId, neighbor: TourId },
    MeetingWithoutEdge { tour: TourId, neighbor: TourId },
    Disconnected { unreachable: Vec<TourId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootMissing(r) => write!(f, "base-station tour {r} does not exist"),
            Violation::MissingBase(r) => write!(f, "base-station tour {r} has no base position"),
            Violation::BaseOffRoot(t) => write!(f, "tour {t} has a base position but is not the root"),
            Violation::UnknownEndpoint { edge } => {
                write!(f, "edge {{{}, {}}} references an unknown tour", edge.0, edge.1)
            }
            Violation::MissingMeeting { tour, neighbor } => {
                write!(f, "tour {tour} has no meeting position for neighbor {neighbor}")
            }
            Violation::MeetingWithoutEdge { tour, neighbor } => {
                write!(f, "tour {tour} has a meeting position for {neighbor} but no edge")
            }
            Violation::Disconnected { unreachable } => {
                write!(f, "tours unreachable from the root: {unreachable:?}")
            }
        }
    }
}

fn unreachable_from(
    nodes: impl Iterator<Item = TourId>,
    adjacency: &BTreeMap<TourId, Vec<TourId>>,
    root: TourId,
) -> Vec<TourId> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    seen.insert(root);
    while let Some(v) = queue.pop_front() {
        for &w in adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    nodes.filter(|v| !seen.contains(v)).collect()
}

/// Tours as vertices, meeting points as edges, one tour carrying the base
/// station.
#[derive(Clone, Debug, PartialEq)]
pub struct TourGraph {
    tours: BTreeMap<TourId, Tour>,
    edges: BTreeSet<(TourId, TourId)>,
    root: TourId,
}

impl TourGraph {
    /// Builds the graph with an edge for every mutual pair of meeting
    /// positions and rejects it if any invariant fails.
    pub fn new(tours: impl IntoIterator<Item = Tour>, root: TourId) -> Result<TourGraph> {
        let tours: BTreeMap<TourId, Tour> = tours.into_iter().map(|t| (t.id, t)).collect();
        let mut edges = BTreeSet::new();
        for t in tours.values() {
            for &nb in t.meetings.keys() {
                if tours.get(&nb).is_some_and(|o| o.meetings.contains_key(&t.id)) {
                    edges.insert(edge_key(t.id, nb));
                }
            }
        }
        let g = TourGraph { tours, edges, root };
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidGraph(text.join("; ")))
        }
    }

    /// Assembles a graph without checking it; see [`TourGraph::validate`].
    pub fn from_parts(
        tours: impl IntoIterator<Item = Tour>,
        edges: impl IntoIterator<Item = (TourId, TourId)>,
        root: TourId,
    ) -> TourGraph {
        TourGraph {
            tours: tours.into_iter().map(|t| (t.id, t)).collect(),
            edges: edges.into_iter().map(|(a, b)| edge_key(a, b)).collect(),
            root,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self.tours.get(&self.root) {
            None => out.push(Violation::RootMissing(self.root)),
            Some(t) if t.base.is_none() => out.push(Violation::MissingBase(self.root)),
            _ => {}
        }
        for t in self.tours.values() {
            if t.id != self.root && t.base.is_some() {
                out.push(Violation::BaseOffRoot(t.id));
            }
        }
        for &(a, b) in &self.edges {
            let (Some(ta), Some(tb)) = (self.tours.get(&a), self.tours.get(&b)) else {
                out.push(Violation::UnknownEndpoint { edge: (a, b) });
                continue;
            };
            if ta.meeting(b).is_none() {
                out.push(Violation::MissingMeeting { tour: a, neighbor: b });
            }
            if tb.meeting(a).is_none() {
                out.push(Violation::MissingMeeting { tour: b, neighbor: a });
            }
        }
        for t in self.tours.values() {
            for &nb in t.meetings.keys() {
                if !self.edges.contains(&edge_key(t.id, nb)) {
                    out.push(Violation::MeetingWithoutEdge {
                        tour: t.id,
                        neighbor: nb,
                    });
                }
            }
        }
        if self.tours.contains_key(&self.root) {
            let unreachable = unreachable_from(self.tours.keys().copied(), &self.adjacency(), self.root);
            if !unreachable.is_empty() {
                out.push(Violation::Disconnected { unreachable });
            }
        }
        out
    }

    pub fn root(&self) -> TourId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    pub fn tours(&self) -> impl Iterator<Item = &Tour> {
        self.tours.values()
    }

    pub fn tour_ids(&self) -> impl Iterator<Item = TourId> + '_ {
        self.tours.keys().copied()
    }

    pub fn tour(&self, id: TourId) -> Result<&Tour> {
        self.tours.get(&id).ok_or(Error::UnknownTour(id))
    }

    pub fn edges(&self) -> &BTreeSet<(TourId, TourId)> {
        &self.edges
    }

    pub fn has_edge(&self, a: TourId, b: TourId) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> BTreeMap<TourId, Vec<TourId>> {
        let mut adj: BTreeMap<TourId, Vec<TourId>> = self.tours.keys().map(|&k| (k, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for list in adj.values_mut() {
            list.sort();
        }
        adj
    }

    /// Hop distance of every tour from the root.
    pub fn hop_depths(&self) -> BTreeMap<TourId, usize> {
        let adj = self.adjacency();
        let mut depth = BTreeMap::from([(self.root, 0usize)]);
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            let dv = depth[&v];
            for &w in &adj[&v] {
                if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(w) {
                    e.insert(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    /// Largest hop distance from any tour to the root.
    pub fn sp_depth(&self) -> usize {
        self.hop_depths().values().copied().max().unwrap_or(0)
    }

    pub fn max_length(&self) -> f64 {
        self.tours.values().map(|t| t.length).fold(0.0, f64::max)
    }

    pub fn total_length(&self) -> f64 {
        self.tours.values().map(|t| t.length).sum()
    }

    pub fn is_fully_sensed(&self) -> bool {
        self.tours.values().all(Tour::is_fully_sensed)
    }

    /// Copy keeping only `edges`, with meeting positions of dropped edges
    /// removed.
    pub fn restrict(&self, edges: &BTreeSet<(TourId, TourId)>) -> TourGraph {
        let mut tours = self.tours.clone();
        for t in tours.values_mut() {
            let id = t.id;
            t.retain_meetings(|nb| edges.contains(&edge_key(id, nb)));
        }
        TourGraph {
            tours,
            edges: edges.clone(),
            root: self.root,
        }
    }
}

/// Tours with several candidate meeting points per neighboring pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TourMultiGraph {
    tours: BTreeMap<TourId, Tour>,
    /// Keyed by `(lower id, higher id)`; entries are
    /// `(position on lower, position on higher)`.
    candidates: BTreeMap<(TourId, TourId), Vec<(f64, f64)>>,
    root: TourId,
}

impl TourMultiGraph {
    pub fn new(
        tours: impl IntoIterator<Item = Tour>,
        candidates: BTreeMap<(TourId, TourId), Vec<(f64, f64)>>,
        root: TourId,
    ) -> Result<TourMultiGraph> {
        let mut tours: BTreeMap<TourId, Tour> = tours.into_iter().map(|t| (t.id, t)).collect();
        for t in tours.values_mut() {
            t.clear_meetings();
        }
        let root_tour = tours.get(&root).ok_or(Error::UnknownTour(root))?;
        if root_tour.base.is_none() {
            return Err(Error::InvalidGraph(format!(
                "base-station tour {root} has no base position"
            )));
        }
        let mut normalized = BTreeMap::new();
        for (&(a, b), list) in &candidates {
            if list.is_empty() {
                return Err(Error::InvalidGraph(format!("no candidates for pair {{{a}, {b}}}")));
            }
            let (ta, tb) = (
                tours.get(&a).ok_or(Error::UnknownTour(a))?,
                tours.get(&b).ok_or(Error::UnknownTour(b))?,
            );
            let flip = a > b;
            let mut out = Vec::with_capacity(list.len());
            for &(pa, pb) in list {
                ta.check(pa)?;
                tb.check(pb)?;
                out.push(if flip { (pb, pa) } else { (pa, pb) });
            }
            normalized.insert(edge_key(a, b), out);
        }
        let g = TourMultiGraph {
            tours,
            candidates: normalized,
            root,
        };
        let unreachable = unreachable_from(g.tours.keys().copied(), &g.adjacency(), root);
        if !unreachable.is_empty() {
            return Err(Error::Disconnected(unreachable));
        }
        Ok(g)
    }

    pub fn root(&self) -> TourId {
        self.root
    }

    pub fn tours(&self) -> impl Iterator<Item = &Tour> {
        self.tours.values()
    }

    pub fn tour(&self, id: TourId) -> Result<&Tour> {
        self.tours.get(&id).ok_or(Error::UnknownTour(id))
    }

    pub fn candidates(&self) -> &BTreeMap<(TourId, TourId), Vec<(f64, f64)>> {
        &self.candidates
    }

    pub fn adjacency(&self) -> BTreeMap<TourId, Vec<TourId>> {
        let mut adj: BTreeMap<TourId, Vec<TourId>> = self.tours.keys().map(|&k| (k, Vec::new())).collect();
        for &(a, b) in self.candidates.keys() {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for list in adj.values_mut() {
            list.sort();
        }
        adj
    }
}

/// A spanning tree of a tour graph with every arc pointing towards the root.
#[derive(Clone, Debug, PartialEq)]
pub struct TourTree {
    graph: TourGraph,
    parent: BTreeMap<TourId, TourId>,
    children: BTreeMap<TourId, Vec<TourId>>,
}

impl TourTree {
    /// Builds the tree from `child -> parent` arcs; each arc must be an edge
    /// of `graph`.
    pub fn from_parents(graph: &TourGraph, parent: BTreeMap<TourId, TourId>) -> Result<TourTree> {
        let root = graph.root();
        if parent.contains_key(&root) {
            return Err(Error::InvalidTree(format!("root {root} has a parent")));
        }
        let mut children: BTreeMap<TourId, Vec<TourId>> = graph.tour_ids().map(|v| (v, Vec::new())).collect();
        for (&c, &p) in &parent {
            if !graph.has_edge(c, p) {
                return Err(Error::InvalidTree(format!("arc ({c}, {p}) is not a graph edge")));
            }
            children.get_mut(&p).ok_or(Error::UnknownTour(p))?.push(c);
        }
        for v in graph.tour_ids() {
            if v != root && !parent.contains_key(&v) {
                return Err(Error::InvalidTree(format!("tour {v} has no parent")));
            }
        }
        // every vertex must reach the root by following parents
        for v in graph.tour_ids() {
            let mut cur = v;
            let mut steps = 0;
            while cur != root {
                cur = parent[&cur];
                steps += 1;
                if steps > graph.len() {
                    return Err(Error::InvalidTree(format!("cycle through tour {v}")));
                }
            }
        }
        let edges: BTreeSet<_> = parent.iter().map(|(&c, &p)| edge_key(c, p)).collect();
        Ok(TourTree {
            graph: graph.restrict(&edges),
            parent,
            children,
        })
    }

    /// Orients a set of undirected spanning-tree edges towards the root.
    pub fn from_edges(graph: &TourGraph, edges: &BTreeSet<(TourId, TourId)>) -> Result<TourTree> {
        if edges.len() + 1 != graph.len() {
            return Err(Error::InvalidTree(format!(
                "{} edges cannot span {} tours",
                edges.len(),
                graph.len()
            )));
        }
        let mut adj: BTreeMap<TourId, Vec<TourId>> = BTreeMap::new();
        for &(a, b) in edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut parent = BTreeMap::new();
        let mut seen = BTreeSet::from([graph.root()]);
        let mut queue = VecDeque::from([graph.root()]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        TourTree::from_parents(graph, parent)
    }

    /// The graph itself when it already is a tree.
    pub fn from_graph(graph: &TourGraph) -> Result<TourTree> {
        TourTree::from_edges(graph, graph.edges())
    }

    pub fn graph(&self) -> &TourGraph {
        &self.graph
    }

    pub fn root(&self) -> TourId {
        self.graph.root()
    }

    pub fn parent(&self, v: TourId) -> Option<TourId> {
        self.parent.get(&v).copied()
    }

    pub fn parents(&self) -> &BTreeMap<TourId, TourId> {
        &self.parent
    }

    pub fn children(&self, v: TourId) -> &[TourId] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn children_map(&self) -> &BTreeMap<TourId, Vec<TourId>> {
        &self.children
    }

    pub fn is_leaf(&self, v: TourId) -> bool {
        self.children(v).is_empty()
    }

    /// `(child, parent)` arcs.
    pub fn arcs(&self) -> impl Iterator<Item = (TourId, TourId)> + '_ {
        self.parent.iter().map(|(&c, &p)| (c, p))
    }

    pub fn tour(&self, v: TourId) -> Result<&Tour> {
        self.graph.tour(v)
    }

    /// Position where tour `v` meets its parent (the base for the root).
    pub fn start_position(&self, v: TourId) -> Result<f64> {
        let t = self.graph.tour(v)?;
        let pos = match self.parent(v) {
            None => t.base(),
            Some(p) => t.meeting(p),
        };
        pos.ok_or_else(|| Error::InvalidTree(format!("tour {v} lacks its start position")))
    }

    pub fn depth(&self, v: TourId) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            cur = p;
            d += 1;
        }
        d
    }

    /// Largest depth of any tour.
    pub fn height(&self) -> usize {
        self.graph.tour_ids().map(|v| self.depth(v)).max().unwrap_or(0)
    }

    /// Tours ordered so that every child precedes its parent.
    pub fn post_order(&self) -> Vec<TourId> {
        let mut order = Vec::with_capacity(self.graph.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
            } else {
                stack.push((v, true));
                for &c in self.children(v).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }
}
