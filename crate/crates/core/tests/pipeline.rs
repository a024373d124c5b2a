//! Grid scenario to loops, meeting points, trees and comparison rows.

use std::collections::BTreeSet;

use tour_patrol::experiment::{compare_loops, grid_graph, sweep_grid};
use tour_patrol::gen::{
    candidate_meetings, corridor, default_budget, grand_tour, k_splitour, single_hop_tours, GridScenario,
};
use tour_patrol::trees::ExactOptions;
use tour_patrol::{Execution, Method};

fn chebyshev(a: (i32, i32), b: (i32, i32)) -> i32 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[test]
fn loops_cover_every_free_cell() {
    let grid = GridScenario::new(12, 18, 5, 1, 3);
    let tour = grand_tour(&grid).unwrap();
    assert!(tour.is_closed_walk(&grid));
    let loops = k_splitour(&grid, &tour, 5).unwrap();
    assert_eq!(loops.len(), 5);
    let covered: BTreeSet<_> = loops.iter().flat_map(|l| l.cells.iter().copied()).collect();
    let free: BTreeSet<_> = grid.free_cells().into_iter().collect();
    assert_eq!(covered, free);
    assert!(loops.iter().all(|l| l.is_closed_walk(&grid)));
    assert!(loops[0].cells.contains(&grid.base));
}

#[test]
fn candidates_respect_range_and_sight() {
    let (grid, loops) = corridor();
    let mg = candidate_meetings(&grid, &loops).unwrap();
    let tours: Vec<_> = mg.tours().map(|t| t.id()).collect();
    assert_eq!(tours.len(), 8);
    for (&(a, b), options) in mg.candidates() {
        assert!(!options.is_empty());
        for &(pa, pb) in options {
            let ca = loops[a.0 as usize].cells[pa as usize];
            let cb = loops[b.0 as usize].cells[pb as usize];
            assert!(chebyshev(ca, cb) <= grid.rcom);
            assert!(grid.line_of_sight(ca, cb));
        }
    }
    // the wall separates the rows except at the open left end
    let (g, _) = grid_graph(&grid, &loops).unwrap();
    assert!(g.has_edge(tours[0], tours[4]));
    assert!(!g.has_edge(tours[1], tours[5]));
}

#[test]
fn single_hop_plan_stays_within_budget() {
    let grid = GridScenario::new(20, 60, 6, 1, 2);
    let tour = grand_tour(&grid).unwrap();
    let loops = k_splitour(&grid, &tour, 6).unwrap();
    let longest = loops.iter().map(|l| l.len()).max().unwrap() as f64;
    let budget = default_budget(&grid, &loops, longest).unwrap();
    let plan = single_hop_tours(&grid, &loops, budget).unwrap();
    assert_eq!(plan.routes.len(), 6);
    for (route, walk) in plan.routes.iter().zip(&plan.walks) {
        assert!(walk.is_closed_walk(&grid));
        assert!(walk.cells.contains(&grid.base));
        assert!(!route.deliveries.is_empty());
        if plan.forced.is_empty() {
            assert!(route.length <= budget + 1e-9);
        }
    }
}

#[test]
fn sweeps_are_reproducible_in_parallel_and_in_sequence() {
    let base = GridScenario::new(16, 24, 2, 1, 0);
    let methods = [Method::Sp, Method::Cg];
    let options = ExactOptions::default();
    let par = sweep_grid(&base, &[2, 4, 6], &[1, 2], &methods, options, Execution::Parallel).unwrap();
    let seq = sweep_grid(&base, &[2, 4, 6], &[1, 2], &methods, options, Execution::Sequential).unwrap();
    assert_eq!(par.len(), 3 * 2 * 3);
    assert_eq!(format!("{par:?}"), format!("{seq:?}"));
}

#[test]
fn exhaustive_method_is_refused_on_large_grids() {
    let grid = GridScenario::new(20, 60, 12, 1, 1);
    let tour = grand_tour(&grid).unwrap();
    let loops = k_splitour(&grid, &tour, 12).unwrap();
    let options = ExactOptions {
        cap: 10,
        execution: Execution::Sequential,
    };
    let (rows, _) = compare_loops(&grid, &loops, &[Method::Opt, Method::Cg], options).unwrap();
    let opt = rows.iter().find(|r| r.method == "opt").unwrap();
    assert_eq!(opt.status, "size-cap");
    assert!(rows.iter().any(|r| r.method == "cg" && r.status == "ok"));
}
