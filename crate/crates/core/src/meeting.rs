//! Greedy reduction of candidate meeting points to one per tour pair.
//!
//! Tours are visited breadth-first from the base-station tour. For every
//! pair not yet decided, the candidate with the shortest data path to the
//! base through the meeting points chosen so far wins. Earlier choices are
//! never revisited.

use std::collections::{BTreeMap, VecDeque};

use crate::converted::{shorter_arc, ConvertedGraph, MeetVertex};
use crate::error::Result;
use crate::tour::{edge_key, TourGraph, TourId, TourMultiGraph};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionTrace {
    /// Tours in processing order.
    pub order: Vec<TourId>,
    /// Index of the chosen candidate per pair.
    pub chosen: BTreeMap<(TourId, TourId), usize>,
    /// Distance to the base of the chosen candidate when it was picked.
    pub rationale: BTreeMap<(TourId, TourId), f64>,
    /// Distances of all candidates of the pair at selection time.
    pub candidate_distances: BTreeMap<(TourId, TourId), Vec<f64>>,
}

pub fn select_meeting_points(mg: &TourMultiGraph) -> Result<(TourGraph, SelectionTrace)> {
    let adj = mg.adjacency();
    let root = mg.root();
    let base = mg.tour(root)?.base().expect("multigraph root carries the base");

    let mut order = Vec::new();
    let mut seen = std::collections::BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[&v] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }

    let mut placed: Vec<(MeetVertex, Vec<(TourId, f64)>)> = vec![(MeetVertex::Base, vec![(root, base)])];
    let mut trace = SelectionTrace {
        order: order.clone(),
        ..SelectionTrace::default()
    };
    for &v in &order {
        for &w in &adj[&v] {
            let key = edge_key(v, w);
            if trace.chosen.contains_key(&key) {
                continue;
            }
            let cg = ConvertedGraph::from_vertices(|t| mg.tour(t), placed.clone())?;
            let dist = cg.shortest_paths(0).dist;
            let reach = |tour: TourId, pos: f64| -> Result<f64> {
                let t = mg.tour(tour)?;
                let mut best = f64::INFINITY;
                for (i, (_, places)) in placed.iter().enumerate() {
                    for &(pt, pp) in places {
                        if pt == tour {
                            best = best.min(dist[i] + shorter_arc(t, pp, pos).0);
                        }
                    }
                }
                Ok(best)
            };
            let list = &mg.candidates()[&key];
            let mut dists = Vec::with_capacity(list.len());
            for &(pa, pb) in list {
                dists.push(reach(key.0, pa)?.min(reach(key.1, pb)?));
            }
            let mut pick = 0;
            for i in 1..list.len() {
                let better = dists[i] < dists[pick] || (dists[i] == dists[pick] && list[i].0 < list[pick].0);
                if better {
                    pick = i;
                }
            }
            let (pa, pb) = list[pick];
            placed.push((MeetVertex::Meeting(key.0, key.1), vec![(key.0, pa), (key.1, pb)]));
            trace.chosen.insert(key, pick);
            trace.rationale.insert(key, dists[pick]);
            trace.candidate_distances.insert(key, dists);
        }
    }

    let mut tours: BTreeMap<TourId, crate::tour::Tour> = mg.tours().map(|t| (t.id(), t.clone())).collect();
    for (&(a, b), &i) in &trace.chosen {
        let (pa, pb) = mg.candidates()[&(a, b)][i];
        tours.get_mut(&a).expect("known tour").set_meeting(b, pa)?;
        tours.get_mut(&b).expect("known tour").set_meeting(a, pb)?;
    }
    let graph = TourGraph::new(tours.into_values(), root)?;
    Ok((graph, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::Tour;

    fn mg(candidates: Vec<(f64, f64)>) -> TourMultiGraph {
        let a = Tour::new(TourId(0), 10.0).unwrap().with_base(0.0).unwrap();
        let b = Tour::new(TourId(1), 8.0).unwrap();
        TourMultiGraph::new(
            [a, b],
            BTreeMap::from([((TourId(0), TourId(1)), candidates)]),
            TourId(0),
        )
        .unwrap()
    }

    #[test]
    fn single_candidate_is_taken() {
        let (g, trace) = select_meeting_points(&mg(vec![(3.0, 1.0)])).unwrap();
        assert_eq!(g.tour(TourId(0)).unwrap().meeting(TourId(1)), Some(3.0));
        assert_eq!(g.tour(TourId(1)).unwrap().meeting(TourId(0)), Some(1.0));
        assert_eq!(trace.chosen[&(TourId(0), TourId(1))], 0);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn closest_candidate_wins() {
        let (g, trace) = select_meeting_points(&mg(vec![(5.0, 0.0), (2.0, 4.0)])).unwrap();
        assert_eq!(trace.rationale[&(TourId(0), TourId(1))], 2.0);
        assert_eq!(trace.candidate_distances[&(TourId(0), TourId(1))], vec![5.0, 2.0]);
        assert_eq!(g.tour(TourId(0)).unwrap().meeting(TourId(1)), Some(2.0));
    }

    #[test]
    fn ties_prefer_smaller_position_on_lower_tour() {
        let (_, trace) = select_meeting_points(&mg(vec![(8.0, 0.0), (2.0, 4.0)])).unwrap();
        assert_eq!(trace.chosen[&(TourId(0), TourId(1))], 1);
    }
}
