//! End-to-end runs: grid scenario to tours, meeting points, tree, schedule
//! and simulated metrics, next to the single-hop baseline.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{candidate_meetings, default_budget, single_hop_tours, CellLoop, GridScenario, SingleHopPlan};
use crate::meeting::{select_meeting_points, SelectionTrace};
use crate::par::Execution;
use crate::sim::{run_single_hop, Metrics, SimConfig, SimWorld};
use crate::tour::{Direction, TourGraph, TourId};
use crate::trees::{brute_force_optimal_with, mdtd_cg, mdtd_sp, ExactOptions, Method, SolveResult};

/// Tour graph of a grid scenario, with meeting points chosen greedily.
pub fn grid_graph(grid: &GridScenario, loops: &[CellLoop]) -> Result<(TourGraph, SelectionTrace)> {
    let mg = candidate_meetings(grid, loops)?;
    select_meeting_points(&mg)
}

pub fn solve(graph: &TourGraph, method: Method, options: ExactOptions) -> Result<SolveResult> {
    solve_fixed(graph, method, None, options)
}

/// Like [`solve`], keeping `fixed` directions: the heuristics pick the tree
/// and the schedule is rebuilt with the given directions.
pub fn solve_fixed(
    graph: &TourGraph,
    method: Method,
    fixed: Option<&BTreeMap<TourId, Direction>>,
    options: ExactOptions,
) -> Result<SolveResult> {
    let s = match method {
        Method::Sp => mdtd_sp(graph)?,
        Method::Cg => mdtd_cg(graph)?,
        Method::Opt => return brute_force_optimal_with(graph, fixed, options),
    };
    match fixed {
        Some(dirs) => SolveResult::assemble(method, s.tree, dirs.clone()),
        None => Ok(s),
    }
}

/// Simulation window that starts once the startup transient is over and
/// spans two periods.
pub fn steady_window(solution: &SolveResult) -> SimConfig {
    let period = solution.tree.graph().max_length();
    let warmup = (solution.tree.height() as f64 + 3.0) * period;
    SimConfig::new(warmup + 2.0 * period, warmup)
}

/// Simulates `solution` from the start positions over its steady window.
pub fn simulate_steady(solution: &SolveResult) -> Result<Metrics> {
    let config = steady_window(solution);
    Ok(SimWorld::new(solution, config)?.run().0)
}

/// One comparison cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: String,
    pub n: usize,
    pub seed: u64,
    pub wi: f64,
    pub wd: f64,
    /// Summed distance over one cooperative worst idleness after warm-up.
    pub sum_distance: f64,
    pub status: String,
}

impl CompareRow {
    fn failed(method: &str, n: usize, seed: u64, status: &str) -> CompareRow {
        CompareRow {
            method: method.into(),
            n,
            seed,
            wi: f64::NAN,
            wd: f64::NAN,
            sum_distance: f64::NAN,
            status: status.into(),
        }
    }
}

/// Runs every cooperative method and the single-hop baseline on the same
/// loops. Distances are summed over a window as long as the worst
/// cooperative idleness.
pub fn compare_loops(
    grid: &GridScenario,
    loops: &[CellLoop],
    methods: &[Method],
    options: ExactOptions,
) -> Result<(Vec<CompareRow>, Option<SingleHopPlan>)> {
    let (graph, _) = grid_graph(grid, loops)?;
    let n = loops.len();
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    for &m in methods {
        match solve(&graph, m, options) {
            Ok(s) => solutions.push(s),
            Err(Error::SizeCap { .. }) => rows.push(CompareRow::failed(m.as_str(), n, grid.seed, "size-cap")),
            Err(e) => return Err(e),
        }
    }
    let wi = graph.max_length();
    for s in &solutions {
        let mut config = steady_window(s);
        config.distance_window = Some((config.warmup, config.warmup + wi));
        let (m, _) = SimWorld::new(s, config)?.run();
        rows.push(CompareRow {
            method: s.method.as_str().into(),
            n,
            seed: grid.seed,
            wi: m.worst_idleness,
            wd: m.worst_delay,
            sum_distance: m.sum_distance(),
            status: m.status(),
        });
    }
    let budget = default_budget(grid, loops, wi);
    let plan = match budget.and_then(|b| single_hop_tours(grid, loops, b)) {
        Ok(plan) => plan,
        Err(Error::UnboundedDelay(_)) => {
            rows.push(CompareRow::failed("singlehop", n, grid.seed, "unbounded"));
            return Ok((rows, None));
        }
        Err(e) => return Err(e),
    };
    let longest = plan.routes.iter().map(|r| r.length).fold(0.0, f64::max);
    let warmup = 2.0 * longest;
    let mut config = SimConfig::new(warmup + 2.0 * longest, warmup);
    config.distance_window = Some((warmup, warmup + wi));
    let m = run_single_hop(&plan.routes, &config)?;
    rows.push(CompareRow {
        method: "singlehop".into(),
        n,
        seed: grid.seed,
        wi: m.worst_idleness,
        wd: m.worst_delay,
        sum_distance: m.sum_distance(),
        status: if plan.forced.is_empty() {
            "ok".into()
        } else {
            "forced-detour".into()
        },
    });
    Ok((rows, Some(plan)))
}

/// Sweep over robot counts on grids that share size, obstacles and seed:
/// the grand tour is computed once per seed and split per count.
pub fn sweep_grid(
    base: &GridScenario,
    counts: &[usize],
    seeds: &[u64],
    methods: &[Method],
    options: ExactOptions,
    execution: Execution,
) -> Result<Vec<CompareRow>> {
    let mut cells = Vec::new();
    for &seed in seeds {
        let grid = GridScenario { seed, ..base.clone() };
        let tour = crate::gen::grand_tour(&grid)?;
        for &n in counts {
            cells.push((grid.clone(), tour.clone(), n));
        }
    }
    let results = execution.map(&cells, |(grid, tour, n)| -> Result<Vec<CompareRow>> {
        let grid = GridScenario { n: *n, ..grid.clone() };
        let loops = crate::gen::k_splitour(&grid, tour, *n)?;
        Ok(compare_loops(&grid, &loops, methods, options)?.0)
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| (a.n, a.seed, &a.method).cmp(&(b.n, b.seed, &b.method)));
    Ok(rows)
}
