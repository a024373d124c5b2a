use std::collections::BTreeMap;

use super::{ensure_valid, Method, SolveResult};
use crate::error::Result;
use crate::schedule::minimum_delay_schedule;
use crate::tour::{TourGraph, TourTree};

/// Breadth-first tree: every tour hangs below its lowest-id neighbor one
/// hop closer to the root, then directions come from the minimum-delay
/// schedule on that tree.
pub fn mdtd_sp(graph: &TourGraph) -> Result<SolveResult> {
    ensure_valid(graph)?;
    let depth = graph.hop_depths();
    let adj = graph.adjacency();
    let mut parent = BTreeMap::new();
    for (&v, &dv) in &depth {
        if v == graph.root() {
            continue;
        }
        let p = adj[&v]
            .iter()
            .copied()
            .find(|w| depth[w] + 1 == dv)
            .expect("breadth-first depth has a predecessor");
        parent.insert(v, p);
    }
    let tree = TourTree::from_parents(graph, parent)?;
    let (schedule, report) = minimum_delay_schedule(&tree)?;
    Ok(SolveResult {
        method: Method::Sp,
        directions: schedule.directions(),
        tree,
        schedule,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::{Tour, TourId};

    fn triangle() -> TourGraph {
        let t = |id: u32, nbs: [(u32, f64); 2]| {
            let mut t = Tour::new(TourId(id), 6.0).unwrap();
            for (n, p) in nbs {
                t = t.with_meeting(TourId(n), p).unwrap();
            }
            t
        };
        TourGraph::new(
            [
                t(0, [(1, 1.0), (2, 3.0)]).with_base(0.0).unwrap(),
                t(1, [(0, 0.0), (2, 2.0)]),
                t(2, [(0, 0.0), (1, 4.0)]),
            ],
            TourId(0),
        )
        .unwrap()
    }

    #[test]
    fn triangle_gives_star() {
        let r = mdtd_sp(&triangle()).unwrap();
        let arcs: Vec<_> = r.tree.arcs().collect();
        assert_eq!(arcs, vec![(TourId(1), TourId(0)), (TourId(2), TourId(0))]);
        assert_eq!(r.method, Method::Sp);
    }

    #[test]
    fn disconnected_is_rejected() {
        let a = Tour::new(TourId(0), 5.0).unwrap().with_base(0.0).unwrap();
        let b = Tour::new(TourId(1), 5.0).unwrap();
        let g = TourGraph::from_parts([a, b], [], TourId(0));
        assert!(matches!(mdtd_sp(&g), Err(crate::Error::Disconnected(_))));
    }
}
