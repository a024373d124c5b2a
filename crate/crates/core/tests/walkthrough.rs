//! The hand-built example instances, solved step by step.

use std::collections::BTreeMap;

use tour_patrol::gen::{sample_chain, sample_graph, sample_tree};
use tour_patrol::sim::{simulate, Disturbance, SimConfig};
use tour_patrol::trees::{brute_force_optimal, cg_paths, mdtd_cg, mdtd_cg_raw, mdtd_sp};
use tour_patrol::{Direction, Method, SolveResult, TourId, TourTree};

fn id(i: u32) -> TourId {
    TourId(i)
}

#[test]
fn seven_tour_graph_grows_the_expected_tree() {
    let g = sample_graph();
    let paths = cg_paths(&g).unwrap();
    let order = paths.order();
    assert_eq!(&order[..2], &[id(2), id(1)]);

    let s = mdtd_cg_raw(&g).unwrap();
    let expected: BTreeMap<TourId, TourId> = [(2, 7), (7, 3), (3, 6), (6, 5), (1, 4), (4, 3)]
        .into_iter()
        .map(|(c, p)| (id(c), id(p)))
        .collect();
    assert_eq!(s.tree.parents(), &expected);
    for (t, d) in [
        (7, Direction::Cw),
        (6, Direction::Cw),
        (3, Direction::Ccw),
        (5, Direction::Ccw),
        (4, Direction::Ccw),
    ] {
        assert_eq!(s.directions[&id(t)], d, "tour {t}");
    }
    // re-optimizing directions keeps the tree and never hurts
    let tuned = mdtd_cg(&g).unwrap();
    assert_eq!(tuned.tree.parents(), &expected);
    assert!(tuned.worst_delay() <= s.worst_delay());
}

#[test]
fn seven_tour_graph_heuristics_against_optimum() {
    let g = sample_graph();
    let opt = brute_force_optimal(&g, None).unwrap().worst_delay();
    let cg = mdtd_cg(&g).unwrap().worst_delay();
    let sp = mdtd_sp(&g).unwrap().worst_delay();
    assert!(opt <= cg + 1e-9 && opt <= sp + 1e-9);
}

#[test]
fn seven_tour_tree_has_a_unique_answer() {
    let g = sample_tree();
    let sp = mdtd_sp(&g).unwrap();
    let cg = mdtd_cg(&g).unwrap();
    let opt = brute_force_optimal(&g, None).unwrap();
    assert_eq!(sp.tree.parents(), cg.tree.parents());
    assert_eq!(sp.worst_delay(), opt.worst_delay());
    assert_eq!(cg.worst_delay(), opt.worst_delay());
    assert_eq!(sp.worst_idleness(), 12.0);
}

#[test]
fn chain_absorbs_a_late_robot() {
    let (g, dirs) = sample_chain();
    let tree = TourTree::from_graph(&g).unwrap();
    let s = SolveResult::assemble(Method::Sp, tree, dirs).unwrap();
    let period = g.max_length();
    let config = SimConfig::new(40.0 * period, 30.0 * period);
    let (calm, _) = simulate(&s, &BTreeMap::new(), &[], config.clone()).unwrap();
    let late = Disturbance {
        tour: id(5),
        time: 10.0 * period + 1.0,
        extra_wait: 2.0,
    };
    let (m, world) = simulate(&s, &BTreeMap::new(), &[late], config).unwrap();
    assert!(m.convergence_time > calm.convergence_time);
    assert_eq!(m.worst_delay, calm.worst_delay);
    assert!(world.robots().iter().all(|r| r.delta_t == 0.0));
    // the wait travels up the chain once
    for t in 1..5 {
        let waits = m.loops[&id(t)].iter().filter(|l| l.child_wait > 1e-9).count();
        assert!(waits <= 1, "tour {t} waited {waits} times");
    }
}
