//! Text renderings of graphs, trees and grid scenarios.

use std::fmt::Write;

use crate::gen::{ascii_map, CellLoop, GridScenario};
use crate::schedule::fmt_num;
use crate::tour::{edge_key, TourGraph};
use crate::trees::SolveResult;

/// Graphviz rendering of `graph`. With a solution, tree arcs are drawn bold
/// from child to parent and the remaining edges dashed and grey; tours are
/// labelled with their direction.
pub fn to_dot(graph: &TourGraph, solution: Option<&SolveResult>) -> String {
    let mut out = String::from("graph tours {\n  node [shape=circle];\n");
    let _ = writeln!(out, "  base [shape=box, label=\"base\"];");
    for t in graph.tours() {
        let mut label = format!("{}\\nL={}", t.id(), fmt_num(t.length()));
        if let Some(d) = solution.and_then(|s| s.directions.get(&t.id())) {
            let _ = write!(label, "\\n{d}");
        }
        let _ = writeln!(out, "  t{} [label=\"{label}\"];", t.id().0);
    }
    let _ = writeln!(out, "  t{} -- base [style=bold, dir=forward];", graph.root().0);
    let tree: Vec<_> = solution.map(|s| s.tree.arcs().collect()).unwrap_or_default();
    for &(a, b) in graph.edges() {
        let label = format!(
            "{}/{}",
            fmt_num(graph.tour(a).ok().and_then(|t| t.meeting(b)).unwrap_or(f64::NAN)),
            fmt_num(graph.tour(b).ok().and_then(|t| t.meeting(a)).unwrap_or(f64::NAN)),
        );
        match tree.iter().find(|&&(c, p)| edge_key(c, p) == (a, b)) {
            Some(&(child, parent)) => {
                let _ = writeln!(
                    out,
                    "  t{} -- t{} [style=bold, dir=forward, label=\"{label}\"];",
                    child.0, parent.0
                );
            }
            None if solution.is_some() => {
                let _ = writeln!(
                    out,
                    "  t{} -- t{} [style=dashed, color=grey, label=\"{label}\"];",
                    a.0, b.0
                );
            }
            None => {
                let _ = writeln!(out, "  t{} -- t{} [label=\"{label}\"];", a.0, b.0);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Character map of a grid scenario: one line per row, top row first.
pub fn to_ascii_map(grid: &GridScenario, loops: &[CellLoop]) -> String {
    ascii_map(grid, loops)
}
