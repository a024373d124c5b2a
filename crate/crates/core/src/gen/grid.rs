//! Grid worlds: robots step between 8-neighboring free cells in one time
//! unit. Every free cell is a sensing location.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::LoopRoute;
use crate::tour::{Tour, TourId, TourMultiGraph};

/// `(x, y)`, with `(0, 0)` the lower-left corner.
pub type Cell = (i32, i32);

const STEPS: [(i32, i32); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

pub fn chebyshev(a: Cell, b: Cell) -> i32 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridScenario {
    pub width: i32,
    pub height: i32,
    pub obstacles: BTreeSet<Cell>,
    pub base: Cell,
    /// Communication range in cells (Chebyshev distance).
    pub rcom: i32,
    /// Number of robots.
    pub n: usize,
    pub seed: u64,
}

impl GridScenario {
    /// Obstacle-free grid with the base in the lower-left corner.
    pub fn new(width: i32, height: i32, n: usize, rcom: i32, seed: u64) -> GridScenario {
        GridScenario {
            width,
            height,
            obstacles: BTreeSet::new(),
            base: (0, 0),
            rcom,
            n,
            seed,
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.0 >= 0 && c.1 >= 0 && c.0 < self.width && c.1 < self.height
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.contains(c) && !self.obstacles.contains(&c)
    }

    fn index(&self, c: Cell) -> usize {
        (c.1 * self.width + c.0) as usize
    }

    fn cell(&self, i: usize) -> Cell {
        (i as i32 % self.width, i as i32 / self.width)
    }

    pub fn cell_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.cell_count())
            .map(|i| self.cell(i))
            .filter(|&c| self.is_free(c))
            .collect()
    }

    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        STEPS
            .iter()
            .map(move |&(dx, dy)| (c.0 + dx, c.1 + dy))
            .filter(|&n| self.is_free(n))
    }

    /// Checks the scenario invariants: positive size, free base, connected
    /// free space.
    pub fn check(&self) -> Result<()> {
        if self.width <= 0 || self.height <= 0 {
            return Err(Error::Parameter(format!(
                "grid size {}x{} is empty",
                self.width, self.height
            )));
        }
        if self.rcom < 0 {
            return Err(Error::Parameter(format!("negative communication range {}", self.rcom)));
        }
        if !self.is_free(self.base) {
            return Err(Error::Infeasible(format!(
                "base cell {:?} is blocked or outside",
                self.base
            )));
        }
        let dist = self.distances(self.base);
        let cut = self
            .free_cells()
            .into_iter()
            .filter(|&c| dist[self.index(c)] == u32::MAX)
            .count();
        if cut > 0 {
            return Err(Error::Infeasible(format!(
                "{cut} free cells cannot be reached from the base"
            )));
        }
        Ok(())
    }

    /// Step counts from `from` to every cell; `u32::MAX` where unreachable.
    pub fn distances(&self, from: Cell) -> Vec<u32> {
        self.search(from).0
    }

    fn search(&self, from: Cell) -> (Vec<u32>, Vec<usize>) {
        let mut dist = vec![u32::MAX; self.cell_count()];
        let mut pred = vec![usize::MAX; self.cell_count()];
        if !self.is_free(from) {
            return (dist, pred);
        }
        dist[self.index(from)] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            let d = dist[self.index(c)];
            for n in self.neighbors(c) {
                let i = self.index(n);
                if dist[i] == u32::MAX {
                    dist[i] = d + 1;
                    pred[i] = self.index(c);
                    queue.push_back(n);
                }
            }
        }
        (dist, pred)
    }

    /// Shortest path of free cells from `from` to `to`, both included.
    pub fn path(&self, from: Cell, to: Cell) -> Option<Vec<Cell>> {
        // searching from the target makes predecessors point forward
        let (dist, pred) = self.search(to);
        if !self.is_free(from) || dist[self.index(from)] == u32::MAX {
            return None;
        }
        let mut out = vec![from];
        let mut i = self.index(from);
        while pred[i] != usize::MAX {
            i = pred[i];
            out.push(self.cell(i));
        }
        Some(out)
    }

    /// No obstacle on the rasterized segment between the two cells.
    pub fn line_of_sight(&self, a: Cell, b: Cell) -> bool {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let (dx, dy) = ((b.0 - a.0).abs(), -(b.1 - a.1).abs());
        let (sx, sy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
        let (mut x, mut y, mut err) = (a.0, a.1, dx + dy);
        loop {
            if !self.is_free((x, y)) {
                return false;
            }
            if (x, y) == b {
                return true;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

/// A closed walk over free cells: consecutive cells (and the last and the
/// first) are 8-neighbors, so the walk takes `cells.len()` time units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellLoop {
    pub cells: Vec<Cell>,
}

/// The closed walk through every sensing cell and the base.
pub type GrandTour = CellLoop;

impl CellLoop {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether the walk is a valid closed walk in `grid`.
    pub fn is_closed_walk(&self, grid: &GridScenario) -> bool {
        let n = self.cells.len();
        n >= 2
            && self.cells.iter().all(|&c| grid.is_free(c))
            && (0..n).all(|i| chebyshev(self.cells[i], self.cells[(i + 1) % n]) == 1)
    }
}

/// Visiting order as a cyclic list of targets; the walk fills gaps with
/// shortest paths.
fn stitch(grid: &GridScenario, order: &[Cell]) -> CellLoop {
    let mut cells = Vec::new();
    for i in 0..order.len() {
        let (a, b) = (order[i], order[(i + 1) % order.len()]);
        let path = grid.path(a, b).expect("connected free space");
        cells.extend_from_slice(&path[..path.len() - 1]);
    }
    if cells.is_empty() {
        cells.extend_from_slice(order);
    }
    CellLoop { cells }
}

struct Metric {
    cells: Vec<Cell>,
    dist: Vec<Vec<u32>>,
}

impl Metric {
    fn new(grid: &GridScenario, cells: Vec<Cell>) -> Metric {
        let dist = cells
            .iter()
            .map(|&c| {
                let d = grid.distances(c);
                cells.iter().map(|&x| d[grid.index(x)]).collect()
            })
            .collect();
        Metric { cells, dist }
    }

    fn d(&self, a: usize, b: usize) -> i64 {
        self.dist[a][b] as i64
    }

    fn cost(&self, order: &[usize]) -> i64 {
        (0..order.len())
            .map(|i| self.d(order[i], order[(i + 1) % order.len()]))
            .sum()
    }

    fn nearest_neighbor(&self, first: usize) -> Vec<usize> {
        let n = self.cells.len();
        let mut used = vec![false; n];
        let mut order = vec![first];
        used[first] = true;
        while order.len() < n {
            let cur = *order.last().expect("non-empty");
            let next = (0..n)
                .filter(|&j| !used[j])
                .min_by_key(|&j| (self.d(cur, j), j))
                .expect("unvisited cell left");
            used[next] = true;
            order.push(next);
        }
        order
    }

    /// 2-opt with first improvement until no reversal shortens the tour.
    fn two_opt(&self, order: &mut [usize]) {
        let n = order.len();
        if n < 4 {
            return;
        }
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..n - 2 {
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let (a, b) = (order[i], order[i + 1]);
                    let (c, d) = (order[j], order[(j + 1) % n]);
                    let delta = self.d(a, c) + self.d(b, d) - self.d(a, b) - self.d(c, d);
                    if delta < 0 {
                        order[i + 1..=j].reverse();
                        improved = true;
                    }
                }
            }
        }
    }
}

/// Restarts of nearest neighbor + 2-opt from random first cells, on top of
/// the one starting at the base.
pub const TSP_RESTARTS: usize = 2;

/// Closed walk through all free cells, starting at the base. Distances are
/// shortest grid paths, which equal the Chebyshev distance without
/// obstacles.
pub fn grand_tour(grid: &GridScenario) -> Result<GrandTour> {
    grid.check()?;
    let cells = grid.free_cells();
    let base = cells.iter().position(|&c| c == grid.base).expect("base is free");
    let metric = Metric::new(grid, cells);
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut firsts = vec![base];
    let mut pool: Vec<usize> = (0..metric.cells.len()).collect();
    pool.shuffle(&mut rng);
    firsts.extend(pool.into_iter().filter(|&i| i != base).take(TSP_RESTARTS));
    let mut best: Option<(i64, Vec<usize>)> = None;
    for first in firsts {
        let mut order = metric.nearest_neighbor(first);
        metric.two_opt(&mut order);
        let cost = metric.cost(&order);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, order));
        }
    }
    let (_, mut order) = best.expect("at least one start");
    let at = order.iter().position(|&i| i == base).expect("base visited");
    order.rotate_left(at);
    let targets: Vec<Cell> = order.into_iter().map(|i| metric.cells[i]).collect();
    Ok(stitch(grid, &targets))
}

/// Splits the grand tour into `k` contiguous pieces of about equal length
/// and closes each piece with a shortest path back to its first cell.
/// Pieces shorter than two cells are merged into their predecessor. The
/// first piece starts at the base.
pub fn k_splitour(grid: &GridScenario, tour: &GrandTour, k: usize) -> Result<Vec<CellLoop>> {
    let n = tour.len();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "cannot split a tour of {n} cells into {k} pieces"
        )));
    }
    if k == 1 {
        return Ok(vec![tour.clone()]);
    }
    let mut bounds = vec![0];
    for j in 1..k {
        // piece j starts after the cells within the first j/k of the tour
        let cut = (j * n).div_ceil(k);
        if cut > *bounds.last().expect("non-empty") {
            bounds.push(cut);
        }
    }
    bounds.push(n);
    let mut pieces: Vec<Vec<Cell>> = bounds.windows(2).map(|w| tour.cells[w[0]..w[1]].to_vec()).collect();
    let mut i = 1;
    while i < pieces.len() {
        if pieces[i].len() < 2 {
            let small = pieces.remove(i);
            pieces[i - 1].extend(small);
        } else {
            i += 1;
        }
    }
    if pieces.len() > 1 && pieces[0].len() < 2 {
        let first = pieces.remove(0);
        let mut merged = first;
        merged.extend(pieces.remove(0));
        pieces.insert(0, merged);
    }
    Ok(pieces.into_iter().map(|p| close(grid, p)).collect())
}

fn close(grid: &GridScenario, mut cells: Vec<Cell>) -> CellLoop {
    let (first, last) = (cells[0], *cells.last().expect("non-empty"));
    let back = grid.path(last, first).expect("connected free space");
    if back.len() > 2 {
        cells.extend_from_slice(&back[1..back.len() - 1]);
    }
    CellLoop { cells }
}

/// Tours for the cell loops: tour `i` is loop `i`, positions are cell
/// indices, every cell is sensed, and tour 0 carries the base at the first
/// visit of the base cell.
pub fn loop_tours(grid: &GridScenario, loops: &[CellLoop]) -> Result<Vec<Tour>> {
    let mut tours = Vec::with_capacity(loops.len());
    for (i, l) in loops.iter().enumerate() {
        let id = TourId(i as u32);
        if !l.is_closed_walk(grid) {
            return Err(Error::InvalidTour {
                tour: id,
                reason: "cell loop is not a closed walk over free cells".into(),
            });
        }
        let mut t = Tour::new(id, l.len() as f64)?;
        if i == 0 {
            let at = l
                .cells
                .iter()
                .position(|&c| c == grid.base)
                .ok_or_else(|| Error::Infeasible("the first tour does not pass the base".into()))?;
            t = t.with_base(at as f64)?;
        }
        tours.push(t);
    }
    Ok(tours)
}

/// All pairs of cells on two loops within communication range and in
/// line of sight of each other become candidate meeting points.
pub fn candidate_meetings(grid: &GridScenario, loops: &[CellLoop]) -> Result<TourMultiGraph> {
    let tours = loop_tours(grid, loops)?;
    let mut candidates = BTreeMap::new();
    for a in 0..loops.len() {
        for b in a + 1..loops.len() {
            let mut list = Vec::new();
            for (pa, &ca) in loops[a].cells.iter().enumerate() {
                for (pb, &cb) in loops[b].cells.iter().enumerate() {
                    if chebyshev(ca, cb) <= grid.rcom && grid.line_of_sight(ca, cb) {
                        list.push((pa as f64, pb as f64));
                    }
                }
            }
            if !list.is_empty() {
                candidates.insert((TourId(a as u32), TourId(b as u32)), list);
            }
        }
    }
    TourMultiGraph::new(tours, candidates, TourId(0))
}

/// Routes of the single-hop baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleHopPlan {
    pub routes: Vec<LoopRoute>,
    pub walks: Vec<CellLoop>,
    /// Detours inserted per tour.
    pub detours: Vec<usize>,
    /// Tours whose single detour already exceeds the budget.
    pub forced: Vec<TourId>,
}

/// Inserts base detours into each loop: the loop is cut into `m` equal
/// stretches and each stretch gets a round trip to the base from its cell
/// closest to the base. The largest `m` keeping the length within
/// `budget` is used, but at least one detour is always inserted.
pub fn single_hop_tours(grid: &GridScenario, loops: &[CellLoop], budget: f64) -> Result<SingleHopPlan> {
    let to_base = grid.distances(grid.base);
    let mut plan = SingleHopPlan {
        routes: Vec::new(),
        walks: Vec::new(),
        detours: Vec::new(),
        forced: Vec::new(),
    };
    for (i, l) in loops.iter().enumerate() {
        let id = TourId(i as u32);
        if l.cells.iter().any(|&c| to_base[grid.index(c)] == u32::MAX) {
            return Err(Error::UnboundedDelay(format!(
                "tour {id} cannot reach the base station"
            )));
        }
        let mut best = with_detours(grid, l, 1, &to_base);
        let mut m = 1;
        if (best.len() as f64) > budget {
            plan.forced.push(id);
        } else {
            while m < l.len() {
                let next = with_detours(grid, l, m + 1, &to_base);
                if next.len() as f64 > budget {
                    break;
                }
                best = next;
                m += 1;
            }
        }
        let sensed: Vec<(f64, usize)> = best
            .iter()
            .enumerate()
            .filter(|&(_o, &(_c, own))| own)
            .map(|(o, &(c, _own))| (o as f64, grid.index(c)))
            .collect();
        let deliveries: Vec<f64> = best
            .iter()
            .enumerate()
            .filter_map(|(o, &(c, _))| (c == grid.base).then_some(o as f64))
            .collect();
        plan.routes.push(LoopRoute {
            tour: id,
            length: best.len() as f64,
            sensed,
            deliveries,
        });
        plan.walks.push(CellLoop {
            cells: best.iter().map(|&(c, _)| c).collect(),
        });
        plan.detours.push(m);
    }
    Ok(plan)
}

/// Length budget for the detour routes: the cooperative worst idleness or
/// the longest loop with a single detour, whichever is larger.
pub fn default_budget(grid: &GridScenario, loops: &[CellLoop], cooperative_wi: f64) -> Result<f64> {
    let to_base = grid.distances(grid.base);
    let mut budget = cooperative_wi;
    for (i, l) in loops.iter().enumerate() {
        if l.cells.iter().any(|&c| to_base[grid.index(c)] == u32::MAX) {
            return Err(Error::UnboundedDelay(format!("tour {i} cannot reach the base station")));
        }
        budget = budget.max(with_detours(grid, l, 1, &to_base).len() as f64);
    }
    Ok(budget)
}

/// The loop with `m` detours, each cell tagged with whether it belongs to
/// the original loop.
fn with_detours(grid: &GridScenario, l: &CellLoop, m: usize, to_base: &[u32]) -> Vec<(Cell, bool)> {
    let n = l.len();
    let mut at = Vec::with_capacity(m);
    for j in 0..m {
        let (lo, hi) = (j * n / m, ((j + 1) * n / m).max(j * n / m + 1));
        let pick = (lo..hi)
            .min_by_key(|&p| (to_base[grid.index(l.cells[p])], p))
            .expect("non-empty stretch");
        at.push(pick);
    }
    at.dedup();
    let mut out = Vec::new();
    for (p, &c) in l.cells.iter().enumerate() {
        out.push((c, true));
        if at.contains(&p) && c != grid.base {
            let go = grid.path(c, grid.base).expect("base reachable");
            let back = grid.path(grid.base, c).expect("base reachable");
            out.extend(go[1..].iter().map(|&x| (x, false)));
            out.extend(back[1..].iter().map(|&x| (x, false)));
        }
    }
    out
}

/// Character map, top row first: `#` obstacle, `B` base, tour index in
/// base 36 for cells on a loop (lowest index wins), `.` otherwise.
pub fn ascii_map(grid: &GridScenario, loops: &[CellLoop]) -> String {
    let mut owner: BTreeMap<Cell, usize> = BTreeMap::new();
    for (i, l) in loops.iter().enumerate() {
        for &c in &l.cells {
            owner.entry(c).or_insert(i);
        }
    }
    let mut out = String::new();
    for y in (0..grid.height).rev() {
        for x in 0..grid.width {
            let c = (x, y);
            let ch = if c == grid.base {
                'B'
            } else if grid.obstacles.contains(&c) {
                '#'
            } else if let Some(&i) = owner.get(&c) {
                std::char::from_digit((i % 36) as u32, 36).expect("digit below 36")
            } else {
                '.'
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Corridor layout: a 40x20 grid with eight rectangular loops in two rows
/// of four, separated by a wall that leaves only the leftmost column of
/// loops able to talk across rows. Lower loops are 34 cells long, upper
/// ones 36.
pub fn corridor() -> (GridScenario, Vec<CellLoop>) {
    let mut grid = GridScenario::new(40, 20, 8, 2, 0);
    for x in 10..40 {
        grid.obstacles.insert((x, 9));
    }
    let mut loops = Vec::new();
    for (row, (y0, h)) in [(0, 9), (10, 10)].into_iter().enumerate() {
        for col in 0..4 {
            let x0 = col * 10;
            let mut l = rectangle(x0, y0, 10, h);
            if row == 0 && col == 0 {
                let at = l
                    .cells
                    .iter()
                    .position(|&c| c == grid.base)
                    .expect("corner on the loop");
                l.cells.rotate_left(at);
            }
            loops.push(l);
        }
    }
    (grid, loops)
}

/// Perimeter of the `w` x `h` block with lower-left corner `(x0, y0)`,
/// counterclockwise from that corner.
pub fn rectangle(x0: i32, y0: i32, w: i32, h: i32) -> CellLoop {
    let mut cells = Vec::new();
    for x in x0..x0 + w {
        cells.push((x, y0));
    }
    for y in y0 + 1..y0 + h {
        cells.push((x0 + w - 1, y));
    }
    for x in (x0..x0 + w - 1).rev() {
        cells.push((x, y0 + h - 1));
    }
    for y in (y0 + 1..y0 + h - 1).rev() {
        cells.push((x0, y));
    }
    CellLoop { cells }
}
