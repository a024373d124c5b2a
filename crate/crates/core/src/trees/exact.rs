use std::collections::{BTreeMap, VecDeque};

use super::{ensure_valid, Method, SolveResult};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::schedule::Shape;
use crate::tour::{Direction, TourGraph, TourId, TourTree};

/// Largest instance the exhaustive search accepts unless overridden.
pub const DEFAULT_CAP: usize = 10;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_VAR: &str = "PATROL_OPT_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for ExactOptions {
    fn default() -> Self {
        let cap = std::env::var(CAP_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_CAP);
        ExactOptions {
            cap,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Clone)]
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }

    fn find(&self, mut x: usize) -> usize {
        while self.0[x] != x {
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// All spanning trees of the graph on `n` vertices with the given edges,
/// as bitmasks over edge indices.
pub fn spanning_trees(n: usize, edges: &[(usize, usize)]) -> Vec<u128> {
    assert!(edges.len() <= 128, "edge masks hold at most 128 edges");
    let mut out = Vec::new();
    if n <= 1 {
        out.push(0);
        return out;
    }
    grow(n, edges, 0, 0, 0, &Dsu::new(n), &mut out);
    out
}

fn grow(n: usize, edges: &[(usize, usize)], idx: usize, mask: u128, taken: usize, dsu: &Dsu, out: &mut Vec<u128>) {
    if taken + 1 == n {
        out.push(mask);
        return;
    }
    if idx == edges.len() || edges.len() - idx < n - 1 - taken {
        return;
    }
    let (a, b) = edges[idx];
    if dsu.find(a) != dsu.find(b) {
        let mut with = dsu.clone();
        with.union(a, b);
        grow(n, edges, idx + 1, mask | (1u128 << idx), taken + 1, &with, out);
    }
    // skipping the edge only pays off if the rest can still connect everything
    let mut rest = dsu.clone();
    let mut parts = (0..n).filter(|&v| dsu.find(v) == v).count();
    for &(x, y) in &edges[idx + 1..] {
        if rest.union(x, y) {
            parts -= 1;
        }
    }
    if parts == 1 {
        grow(n, edges, idx + 1, mask, taken, dsu, out);
    }
}

/// `a` precedes `b` when its sorted edge list is lexicographically smaller.
fn lex_smaller(a: u128, b: u128) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

struct Candidate {
    worst: f64,
    mask: u128,
}

fn better(x: Candidate, y: Candidate) -> Candidate {
    if x.worst < y.worst || (x.worst == y.worst && lex_smaller(x.mask, y.mask)) {
        x
    } else {
        y
    }
}

fn orient(ids: &[TourId], edges: &[(usize, usize)], root: usize, mask: u128) -> BTreeMap<TourId, TourId> {
    let mut adj = vec![Vec::new(); ids.len()];
    for (k, &(a, b)) in edges.iter().enumerate() {
        if mask >> k & 1 == 1 {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut parent = BTreeMap::new();
    let mut seen = vec![false; ids.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent.insert(ids[w], ids[v]);
                queue.push_back(w);
            }
        }
    }
    parent
}

fn post_order(root: TourId, children: &BTreeMap<TourId, Vec<TourId>>) -> Vec<TourId> {
    let mut order = Vec::with_capacity(children.len());
    let mut stack = vec![(root, false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            order.push(v);
        } else {
            stack.push((v, true));
            for &c in &children[&v] {
                stack.push((c, false));
            }
        }
    }
    order
}

/// Exhaustive search over all spanning trees. Without `fixed_directions`
/// every tree gets its best directions; with them the directions are held
/// fixed. Among equally good trees the one with the lexicographically
/// smallest edge list wins.
pub fn brute_force_optimal(
    graph: &TourGraph,
    fixed_directions: Option<&BTreeMap<TourId, Direction>>,
) -> Result<SolveResult> {
    brute_force_optimal_with(graph, fixed_directions, ExactOptions::default())
}

pub fn brute_force_optimal_with(
    graph: &TourGraph,
    fixed_directions: Option<&BTreeMap<TourId, Direction>>,
    options: ExactOptions,
) -> Result<SolveResult> {
    ensure_valid(graph)?;
    if graph.len() > options.cap || graph.edges().len() > 128 {
        return Err(Error::SizeCap {
            size: graph.len(),
            cap: options.cap,
        });
    }
    let ids: Vec<TourId> = graph.tour_ids().collect();
    let index: BTreeMap<TourId, usize> = ids.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let edges: Vec<(usize, usize)> = graph.edges().iter().map(|(a, b)| (index[a], index[b])).collect();
    let root = index[&graph.root()];
    let masks = spanning_trees(ids.len(), &edges);

    let evaluate = |&mask: &u128| -> Candidate {
        let parent = orient(&ids, &edges, root, mask);
        let mut children: BTreeMap<TourId, Vec<TourId>> = ids.iter().map(|&t| (t, Vec::new())).collect();
        for (&c, &p) in &parent {
            children.get_mut(&p).expect("known tour").push(c);
        }
        let order = post_order(graph.root(), &children);
        let shape = Shape {
            graph,
            parent: &parent,
            children: &children,
            order: &order,
        };
        let worst = match shape.solve(fixed_directions) {
            Ok((_, branch)) => branch[&graph.root()],
            Err(_) => f64::INFINITY,
        };
        Candidate { worst, mask }
    };
    let best = options
        .execution
        .map_reduce(&masks, evaluate, better)
        .expect("a connected graph has a spanning tree");

    let parent = orient(&ids, &edges, root, best.mask);
    let tree = TourTree::from_parents(graph, parent)?;
    let directions = match fixed_directions {
        Some(d) => d.clone(),
        None => crate::schedule::minimum_delay_schedule(&tree)?.0.directions(),
    };
    SolveResult::assemble(Method::Opt, tree, directions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_cayley() {
        // complete graphs have n^(n-2) spanning trees
        for n in 2..=6usize {
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
            let trees = spanning_trees(n, &edges);
            assert_eq!(trees.len(), n.pow(n as u32 - 2));
            assert!(trees.iter().all(|m| m.count_ones() as usize == n - 1));
        }
    }

    #[test]
    fn cycle_has_n_trees() {
        let edges = [(0, 1), (1, 2), (2, 3), (0, 3)];
        assert_eq!(spanning_trees(4, &edges).len(), 4);
    }

    #[test]
    fn lexicographic_tiebreak() {
        assert!(lex_smaller(0b0011, 0b0101));
        assert!(!lex_smaller(0b0101, 0b0011));
        assert!(lex_smaller(0b0110, 0b1010));
        assert!(!lex_smaller(0b0110, 0b0110));
    }
}
