//! Property tests over random instances.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tour_patrol::experiment::{simulate_steady, steady_window};
use tour_patrol::gen::{random_graph, random_tree};
use tour_patrol::scenario::ScenarioFile;
use tour_patrol::sim::{simulate, Disturbance, SimConfig};
use tour_patrol::trees::{brute_force_optimal, mdtd_cg, mdtd_sp, spanning_trees};
use tour_patrol::{evaluate_tree_delay, Direction, SolveResult, Tour, TourGraph, TourId, TourTree};

fn tour() -> impl Strategy<Value = (Tour, f64, f64)> {
    (0.5f64..50.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(l, a, b)| (Tour::new(TourId(0), l).unwrap(), a * l, b * l))
}

/// Spanning trees of `g` counted independently: subsets of `n - 1` edges
/// that connect everything.
fn count_trees(g: &TourGraph) -> usize {
    let ids: Vec<TourId> = g.tour_ids().collect();
    let edges: Vec<(TourId, TourId)> = g.edges().iter().copied().collect();
    let mut count = 0;
    for mask in 0u64..1 << edges.len() {
        if mask.count_ones() as usize != ids.len() - 1 {
            continue;
        }
        let chosen: BTreeSet<(TourId, TourId)> = (0..edges.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| edges[i])
            .collect();
        let mut seen = BTreeSet::from([ids[0]]);
        let mut grew = true;
        while grew {
            grew = false;
            for &(a, b) in &chosen {
                if seen.contains(&a) != seen.contains(&b) {
                    seen.insert(a);
                    seen.insert(b);
                    grew = true;
                }
            }
        }
        count += (seen.len() == ids.len()) as usize;
    }
    count
}

fn assert_spanning(g: &TourGraph, s: &SolveResult) {
    let tree = &s.tree;
    assert_eq!(tree.arcs().count(), g.len() - 1);
    for (c, p) in tree.arcs() {
        assert!(g.has_edge(c, p));
    }
    // every tour reaches the root by following parents
    for v in g.tour_ids() {
        let mut cur = v;
        let mut steps = 0;
        while let Some(p) = tree.parent(cur) {
            cur = p;
            steps += 1;
            assert!(steps < g.len());
        }
        assert_eq!(cur, g.root());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn travel_times_close_the_loop((t, p, q) in tour()) {
        let l = t.length();
        let ccw = t.travel_time(p, q, Direction::Ccw).unwrap();
        let cw = t.travel_time(p, q, Direction::Cw).unwrap();
        prop_assert!((0.0..l).contains(&ccw) && (0.0..l).contains(&cw));
        if (ccw - 0.0).abs() > 1e-9 {
            prop_assert!((ccw + cw - l).abs() < 1e-9);
        }
        prop_assert!((t.travel_time(q, p, Direction::Cw).unwrap() - ccw).abs() < 1e-9);
        prop_assert_eq!(t.travel_time(p, p, Direction::Ccw).unwrap(), 0.0);
    }

    #[test]
    fn own_delay_is_bounded_by_the_loop((t, p, _) in tour()) {
        for d in Direction::BOTH {
            let own = t.own_delay(p, d);
            prop_assert!(own > 0.0 && own <= t.length() + 1e-9);
        }
    }

    #[test]
    fn heuristics_return_spanning_trees(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.4, (1.0, 20.0), true).unwrap();
        let sp = mdtd_sp(&g).unwrap();
        let cg = mdtd_cg(&g).unwrap();
        assert_spanning(&g, &sp);
        assert_spanning(&g, &cg);
        prop_assert!((sp.worst_idleness() - g.max_length()).abs() < 1e-9);
    }

    #[test]
    fn tree_enumeration_is_complete(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.5, (1.0, 20.0), false).unwrap();
        let ids: Vec<TourId> = g.tour_ids().collect();
        let index: BTreeMap<TourId, usize> = ids.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|(a, b)| (index[a], index[b])).collect();
        prop_assert_eq!(spanning_trees(ids.len(), &edges).len(), count_trees(&g));
    }

    #[test]
    fn direction_choice_beats_every_assignment(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, n, (1.0, 20.0), true).unwrap();
        let s = mdtd_sp(&g).unwrap();
        let tree = TourTree::from_graph(&g).unwrap();
        let ids: Vec<TourId> = g.tour_ids().collect();
        for mask in 0u32..1 << ids.len() {
            let dirs: BTreeMap<TourId, Direction> = ids
                .iter()
                .enumerate()
                .map(|(i, &t)| (t, if mask >> i & 1 == 1 { Direction::Cw } else { Direction::Ccw }))
                .collect();
            let wd = evaluate_tree_delay(&tree, &dirs).unwrap().worst_delay;
            prop_assert!(s.worst_delay() <= wd + 1e-9);
        }
    }

    #[test]
    fn optimum_never_loses(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.5, (1.0, 20.0), true).unwrap();
        let opt = brute_force_optimal(&g, None).unwrap();
        assert_spanning(&g, &opt);
        prop_assert!(opt.worst_delay() <= mdtd_sp(&g).unwrap().worst_delay() + 1e-9);
        prop_assert!(opt.worst_delay() <= mdtd_cg(&g).unwrap().worst_delay() + 1e-9);
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), n in 1usize..6, at in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, n, (1.0, 20.0), true).unwrap();
        let s = mdtd_sp(&g).unwrap();
        let config = SimConfig { record_trace: true, ..steady_window(&s) };
        let d = Disturbance { tour: TourId(0), time: at * config.warmup, extra_wait: 1.5 };
        let (m1, w1) = simulate(&s, &BTreeMap::new(), &[d], config.clone()).unwrap();
        let (m2, w2) = simulate(&s, &BTreeMap::new(), &[d], config).unwrap();
        prop_assert_eq!(m1, m2);
        prop_assert_eq!(w1.trace(), w2.trace());
    }

    #[test]
    fn steady_simulation_matches_analysis(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.3, (1.0, 20.0), true).unwrap();
        let s = mdtd_cg(&g).unwrap();
        let m = simulate_steady(&s).unwrap();
        prop_assert!((m.worst_delay - s.worst_delay()).abs() < 1e-9);
        prop_assert!((m.worst_idleness - s.worst_idleness()).abs() < 1e-9);
    }

    #[test]
    fn scenario_files_round_trip(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.3, (1.0, 20.0), true).unwrap();
        let s = mdtd_cg(&g).unwrap();
        let text = ScenarioFile::from_graph(&g).with_solution(&s).to_json();
        let back = ScenarioFile::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.graph().unwrap(), g);
        prop_assert_eq!(back.solution().unwrap().unwrap(), s);
    }
}
