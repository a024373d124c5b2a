use std::collections::{BTreeMap, BTreeSet};

use super::{ensure_valid, Method, SolveResult};
use crate::converted::{shorter_arc, ConvertedGraph, ShortestPaths};
use crate::error::Result;
use crate::schedule::{minimum_delay_schedule, with_shape};
use crate::tour::{Direction, TourGraph, TourId, TourTree};

/// Per-tour shortest data paths to the base in the converted graph.
#[derive(Clone, Debug)]
pub struct CgPaths {
    pub converted: ConvertedGraph,
    pub paths: ShortestPaths,
    /// Distance from the tour's closest meeting point to the base.
    pub len: BTreeMap<TourId, f64>,
    /// Converted-graph vertex where the tour's path starts.
    pub start: BTreeMap<TourId, usize>,
    /// Worst own-data delay when the tour starts at its path's first vertex.
    pub own: BTreeMap<TourId, f64>,
}

impl CgPaths {
    fn tours_of(&self, v: usize) -> Vec<TourId> {
        self.converted.placements(v).iter().map(|&(t, _)| t).collect()
    }

    /// Tour order used to grow the tree: longest `len + own` first, ties by
    /// increasing id.
    pub fn order(&self) -> Vec<TourId> {
        let mut ids: Vec<TourId> = self.len.keys().copied().collect();
        ids.sort_by(|a, b| {
            let ka = self.len[a] + self.own[a];
            let kb = self.len[b] + self.own[b];
            kb.total_cmp(&ka).then(a.cmp(b))
        });
        ids
    }
}

pub fn cg_paths(graph: &TourGraph) -> Result<CgPaths> {
    ensure_valid(graph)?;
    let converted = ConvertedGraph::build(graph)?;
    let paths = converted.shortest_paths(0);
    let mut len: BTreeMap<TourId, f64> = graph.tour_ids().map(|t| (t, f64::INFINITY)).collect();
    let mut start = BTreeMap::new();
    for v in 0..converted.len() {
        let d = paths.dist[v];
        for &(t, _) in converted.placements(v) {
            if d < len[&t] {
                len.insert(t, d);
                start.insert(t, v);
            }
        }
    }
    let mut own = BTreeMap::new();
    for t in graph.tours() {
        let pos = converted
            .position_on(start[&t.id()], t.id())
            .expect("path start lies on its tour");
        let best = Direction::BOTH
            .iter()
            .map(|&d| t.own_delay(pos, d))
            .fold(f64::INFINITY, f64::min);
        own.insert(t.id(), best);
    }
    Ok(CgPaths {
        converted,
        paths,
        len,
        start,
        own,
    })
}

/// `max_v (len_v + l_v)`: on fully sensed instances no tree can deliver the
/// data captured right after a robot leaves its start any faster.
pub fn cg_lower_bound(graph: &TourGraph) -> Result<f64> {
    let p = cg_paths(graph)?;
    let mut best = 0.0f64;
    for t in graph.tours() {
        best = best.max(p.len[&t.id()] + t.length());
    }
    Ok(best)
}

/// Stretch of a data path spent on one tour, as converted-graph vertices.
#[derive(Clone, Copy, Debug)]
struct Leg {
    tour: TourId,
    enter: usize,
    exit: usize,
}

/// Tours visited by the data path of `tour`, with loops cut out so every
/// tour appears once.
fn legs(p: &CgPaths, tour: TourId) -> Vec<Leg> {
    let path = p.paths.path(p.start[&tour]);
    let mut out = vec![Leg {
        tour,
        enter: path[0],
        exit: path[0],
    }];
    for w in path.windows(2) {
        let (_, e) = p.paths.pred[w[0]].expect("non-base vertices have a predecessor");
        let on = p.converted.edges()[e].tour;
        let cur = out.last_mut().expect("non-empty");
        if on == cur.tour {
            cur.exit = w[1];
        } else {
            debug_assert!(p.tours_of(w[0]).contains(&on));
            cur.exit = w[0];
            out.push(Leg {
                tour: on,
                enter: w[0],
                exit: w[1],
            });
        }
    }
    // a shortest path may return to a tour it already rode on; keep the
    // first visit and resume from where the later one leaves
    let mut i = 0;
    while i < out.len() {
        if let Some(j) = (i + 1..out.len()).rev().find(|&j| out[j].tour == out[i].tour) {
            out[i].exit = out[j].exit;
            out.drain(i + 1..=j);
        }
        i += 1;
    }
    out
}

/// Tree grown from the converted-graph shortest paths, with directions
/// read off the paths where they are defined and chosen by the
/// minimum-delay rule elsewhere.
pub fn mdtd_cg_raw(graph: &TourGraph) -> Result<SolveResult> {
    let p = cg_paths(graph)?;
    let root = graph.root();
    let mut in_tree = BTreeSet::from([root]);
    let mut parent = BTreeMap::new();
    let mut assigned: BTreeMap<TourId, Direction> = BTreeMap::new();
    for i in p.order() {
        let route = legs(&p, i);
        let mut added = Vec::new();
        for k in 0..route.len() {
            let m = route[k].tour;
            if in_tree.contains(&m) {
                break;
            }
            let next = route[k + 1];
            parent.insert(m, next.tour);
            added.push(m);
            if let std::collections::btree_map::Entry::Vacant(e) = assigned.entry(next.tour) {
                let t = graph.tour(next.tour)?;
                let from = p
                    .converted
                    .position_on(next.enter, next.tour)
                    .expect("leg entry on tour");
                let to = p.converted.position_on(next.exit, next.tour).expect("leg exit on tour");
                e.insert(shorter_arc(t, from, to).1);
            }
        }
        in_tree.extend(added);
    }
    let tree = TourTree::from_parents(graph, parent)?;
    // leaves are never entered by a path, so they fall back to the leaf rule
    let directions = with_shape(&tree, |shape| shape.complete(&assigned))?.0;
    SolveResult::assemble(Method::Cg, tree, directions)
}

/// [`mdtd_cg_raw`] followed by re-optimizing the directions on the chosen
/// tree when that strictly lowers the worst delay.
pub fn mdtd_cg(graph: &TourGraph) -> Result<SolveResult> {
    let raw = mdtd_cg_raw(graph)?;
    let (schedule, report) = minimum_delay_schedule(&raw.tree)?;
    if report.worst_delay < raw.report.worst_delay {
        Ok(SolveResult {
            method: Method::Cg,
            directions: schedule.directions(),
            tree: raw.tree,
            schedule,
            report,
        })
    } else {
        Ok(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::Tour;

    fn chain() -> TourGraph {
        let a = Tour::new(TourId(0), 10.0)
            .unwrap()
            .with_base(0.0)
            .unwrap()
            .with_meeting(TourId(1), 4.0)
            .unwrap();
        let b = Tour::new(TourId(1), 6.0)
            .unwrap()
            .with_meeting(TourId(0), 0.0)
            .unwrap()
            .with_meeting(TourId(2), 2.0)
            .unwrap();
        let c = Tour::new(TourId(2), 3.0).unwrap().with_meeting(TourId(1), 1.0).unwrap();
        TourGraph::new([a, b, c], TourId(0)).unwrap()
    }

    #[test]
    fn tree_graph_is_kept() {
        let g = chain();
        let r = mdtd_cg(&g).unwrap();
        assert_eq!(r.tree.parent(TourId(2)), Some(TourId(1)));
        assert_eq!(r.tree.parent(TourId(1)), Some(TourId(0)));
        let best = minimum_delay_schedule(&r.tree).unwrap().1;
        assert_eq!(r.report.worst_delay, best.worst_delay);
    }

    #[test]
    fn path_directions_follow_short_arcs() {
        let r = mdtd_cg_raw(&chain()).unwrap();
        // data enters tour 0 at 4 and reaches the base at 0: clockwise
        assert_eq!(r.directions[&TourId(0)], Direction::Cw);
        // on tour 1 it goes from 2 to 0: clockwise
        assert_eq!(r.directions[&TourId(1)], Direction::Cw);
    }

    #[test]
    fn lower_bound_holds() {
        let g = chain();
        let lb = cg_lower_bound(&g).unwrap();
        // tour 1: 4 on tour 0 after its own loop of 6
        assert_eq!(lb, 10.0);
        assert!(mdtd_cg(&g).unwrap().report.worst_delay >= lb);
    }
}
