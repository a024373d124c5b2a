//! Converted graph: meeting points as vertices, tour segments as edges.
//!
//! Distances in this graph are the times data needs to travel between
//! meeting points when every robot on the way moves the short way round.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use crate::error::Result;
use crate::tour::{Direction, Tour, TourGraph, TourId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeetVertex {
    /// The base station position on the root tour.
    Base,
    /// Meeting point between two tours, lower id first.
    Meeting(TourId, TourId),
}

impl fmt::Display for MeetVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeetVertex::Base => f.write_str("base"),
            MeetVertex::Meeting(a, b) => write!(f, "m{a}_{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvEdge {
    pub a: usize,
    pub b: usize,
    pub tour: TourId,
    pub weight: f64,
    /// Direction on `tour` that covers `weight` going from `a` to `b`.
    pub direction: Direction,
}

impl ConvEdge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// Direction of travel when leaving from `from`.
    pub fn direction_from(&self, from: usize) -> Direction {
        if from == self.a {
            self.direction
        } else {
            self.direction.opposite()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvertedGraph {
    vertices: Vec<MeetVertex>,
    /// `(tour, position)` pairs of each vertex.
    placements: Vec<Vec<(TourId, f64)>>,
    edges: Vec<ConvEdge>,
    adjacency: Vec<Vec<usize>>,
}

/// Shorter arc between `p` and `q` and the direction realizing it from
/// `p`; counter-clockwise on ties.
pub fn shorter_arc(tour: &Tour, p: f64, q: f64) -> (f64, Direction) {
    let ccw = tour.arc(p, q, Direction::Ccw);
    let cw = tour.arc(p, q, Direction::Cw);
    if ccw <= cw {
        (ccw, Direction::Ccw)
    } else {
        (cw, Direction::Cw)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths from the base vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    /// Predecessor vertex and connecting edge towards the base.
    pub pred: Vec<Option<(usize, usize)>>,
}

impl ShortestPaths {
    /// Vertices from `v` to the base, both included.
    pub fn path(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.pred[cur] {
            out.push(p);
            cur = p;
        }
        out
    }
}

impl ConvertedGraph {
    /// Builds the converted graph of a tour graph: the base vertex first,
    /// then one vertex per edge in edge order.
    pub fn build(graph: &TourGraph) -> Result<ConvertedGraph> {
        let root = graph.tour(graph.root())?;
        let base = root
            .base()
            .ok_or_else(|| crate::Error::InvalidGraph("root tour has no base position".into()))?;
        let mut vertices = vec![(MeetVertex::Base, vec![(root.id(), base)])];
        for &(a, b) in graph.edges() {
            let pa = graph.tour(a)?.meeting(b);
            let pb = graph.tour(b)?.meeting(a);
            let (Some(pa), Some(pb)) = (pa, pb) else {
                return Err(crate::Error::InvalidGraph(format!(
                    "edge {{{a}, {b}}} lacks meeting positions"
                )));
            };
            vertices.push((MeetVertex::Meeting(a, b), vec![(a, pa), (b, pb)]));
        }
        ConvertedGraph::from_vertices(|id| graph.tour(id), vertices)
    }

    /// Builds the graph over arbitrary placed vertices, connecting every
    /// two vertices that share a tour by the shorter arc between them.
    pub fn from_vertices<'t>(
        tour: impl Fn(TourId) -> Result<&'t Tour>,
        vertices: Vec<(MeetVertex, Vec<(TourId, f64)>)>,
    ) -> Result<ConvertedGraph> {
        let n = vertices.len();
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let mut best: Option<ConvEdge> = None;
                for &(ti, pi) in &vertices[i].1 {
                    for &(tj, pj) in &vertices[j].1 {
                        if ti != tj {
                            continue;
                        }
                        let (w, d) = shorter_arc(tour(ti)?, pi, pj);
                        if best.as_ref().is_none_or(|e| w < e.weight) {
                            best = Some(ConvEdge {
                                a: i,
                                b: j,
                                tour: ti,
                                weight: w,
                                direction: d,
                            });
                        }
                    }
                }
                if let Some(e) = best {
                    adjacency[i].push(edges.len());
                    adjacency[j].push(edges.len());
                    edges.push(e);
                }
            }
        }
        let (vertices, placements) = vertices.into_iter().unzip();
        Ok(ConvertedGraph {
            vertices,
            placements,
            edges,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[MeetVertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> MeetVertex {
        self.vertices[i]
    }

    pub fn index_of(&self, v: MeetVertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn placements(&self, i: usize) -> &[(TourId, f64)] {
        &self.placements[i]
    }

    pub fn position_on(&self, i: usize, tour: TourId) -> Option<f64> {
        self.placements[i].iter().find(|(t, _)| *t == tour).map(|&(_, p)| p)
    }

    pub fn edges(&self) -> &[ConvEdge] {
        &self.edges
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&ConvEdge> {
        self.adjacency[a]
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.other(a) == b)
    }

    /// Dijkstra from `source`. A vertex keeps the first predecessor that
    /// reaches it with the final distance.
    pub fn shortest_paths(&self, source: usize) -> ShortestPaths {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((Key(0.0), source)));
        while let Some(Reverse((Key(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &e in &self.adjacency[v] {
                let edge = &self.edges[e];
                let w = edge.other(v);
                let nd = d + edge.weight;
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = Some((v, e));
                    heap.push(Reverse((Key(nd), w)));
                }
            }
        }
        ShortestPaths { dist, pred }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::TourGraph;

    fn star() -> TourGraph {
        // tour 0 (l=12) meets 1, 2, 3 at 0, 4, 9; base at 0
        let mut hub = Tour::new(TourId(0), 12.0).unwrap().with_base(0.0).unwrap();
        for (n, p) in [(1, 0.0), (2, 4.0), (3, 9.0)] {
            hub = hub.with_meeting(TourId(n), p).unwrap();
        }
        let spokes = (1..=3).map(|n| Tour::new(TourId(n), 5.0).unwrap().with_meeting(TourId(0), 0.0).unwrap());
        TourGraph::new(std::iter::once(hub).chain(spokes), TourId(0)).unwrap()
    }

    #[test]
    fn shorter_arcs_between_meeting_points() {
        let cg = ConvertedGraph::build(&star()).unwrap();
        assert_eq!(cg.len(), 4);
        let idx = |a, b| cg.index_of(MeetVertex::Meeting(TourId(a), TourId(b))).unwrap();
        let w = |i, j| cg.edge_between(i, j).unwrap().weight;
        assert_eq!(w(idx(0, 1), idx(0, 2)), 4.0);
        assert_eq!(w(idx(0, 2), idx(0, 3)), 5.0);
        assert_eq!(w(idx(0, 3), idx(0, 1)), 3.0);
        assert_eq!(w(0, idx(0, 1)), 0.0);
        let e = cg.edge_between(idx(0, 3), idx(0, 1)).unwrap();
        assert_eq!(e.direction_from(idx(0, 3)), Direction::Ccw);
    }

    #[test]
    fn tie_prefers_ccw() {
        let t = Tour::new(TourId(0), 10.0).unwrap();
        assert_eq!(shorter_arc(&t, 2.0, 7.0), (5.0, Direction::Ccw));
        assert_eq!(shorter_arc(&t, 7.0, 2.0), (5.0, Direction::Ccw));
        assert_eq!(shorter_arc(&t, 7.0, 6.0), (1.0, Direction::Cw));
    }

    #[test]
    fn shortest_paths_reach_every_vertex() {
        let cg = ConvertedGraph::build(&star()).unwrap();
        let sp = cg.shortest_paths(0);
        assert!(sp.dist.iter().all(|d| d.is_finite()));
        let v3 = cg.index_of(MeetVertex::Meeting(TourId(0), TourId(3))).unwrap();
        assert_eq!(sp.dist[v3], 3.0);
        assert_eq!(*sp.path(v3).last().unwrap(), 0);
    }
}
