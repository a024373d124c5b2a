//! Multi-commodity flow model of tree and direction selection, written in
//! CPLEX LP format.
//!
//! Vertices are `vb` (a virtual base-station vertex) and `t<id>` for each
//! tour. Commodity `c` flows from `vb` to tour `c` along the tree, i.e.
//! opposite to the data. Variables:
//!
//! * `x_<i>_<j>`: arc `(i, j)` is in the tree (binary)
//! * `f_<i>_<j>_c<c>`: flow of commodity `c` on arc `(i, j)`
//! * `u_<j>_cw`, `u_<j>_ccw`: direction of tour `j` (binary)
//! * `o_<j>_<c>_<d>`: linearized `f_<j>_<c>_c<c> * u_<c>_<d>`, the own-data
//!   term of tour `c` below its parent `j`
//! * `p_<i>_<j>_<k>_c<c>_<d>`: linearized `f_<i>_<j> * f_<j>_<k> * u_<j>_<d>`,
//!   data of `c` crossing tour `j` from its child `k` to its parent `i`
//! * `z_c<c>`, `z`: per-commodity and worst delay

use std::fmt::Write as _;

use super::ensure_valid;
use crate::error::Result;
use crate::tour::{Direction, TourGraph, TourId};

const LINE: usize = 100;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Base,
    Tour(TourId),
}

impl Node {
    fn name(self) -> String {
        match self {
            Node::Base => "vb".into(),
            Node::Tour(t) => format!("t{t}"),
        }
    }
}

fn x(a: Node, b: Node) -> String {
    format!("x_{}_{}", a.name(), b.name())
}

fn f(a: Node, b: Node, c: TourId) -> String {
    format!("f_{}_{}_c{c}", a.name(), b.name())
}

fn u(j: TourId, d: Direction) -> String {
    format!("u_t{j}_{d}")
}

/// Writes `name: terms op rhs`, wrapping long term lists.
fn constraint(out: &mut String, name: &str, terms: &[(f64, String)], op: &str, rhs: f64) {
    let mut line = format!(" {name}:");
    let mut first = true;
    for (coef, var) in terms {
        let term = match (first, *coef) {
            (true, 1.0) => var.clone(),
            (true, -1.0) => format!("- {var}"),
            (true, c) => format!("{} {var}", num(c)),
            (false, 1.0) => format!("+ {var}"),
            (false, -1.0) => format!("- {var}"),
            (false, c) if c < 0.0 => format!("- {} {var}", num(-c)),
            (false, c) => format!("+ {} {var}", num(c)),
        };
        first = false;
        if line.len() + term.len() + 1 > LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
        }
        line.push(' ');
        line.push_str(&term);
    }
    if first {
        line.push_str(" 0");
    }
    let _ = writeln!(out, "{line} {op} {}", num(rhs));
}

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Emits the model for `graph`. The output is a pure function of the graph.
pub fn emit_milp(graph: &TourGraph) -> Result<String> {
    ensure_valid(graph)?;
    let root = graph.root();
    let tours: Vec<TourId> = graph.tour_ids().collect();
    let mut arcs = vec![(Node::Base, Node::Tour(root)), (Node::Tour(root), Node::Base)];
    for &(a, b) in graph.edges() {
        arcs.push((Node::Tour(a), Node::Tour(b)));
        arcs.push((Node::Tour(b), Node::Tour(a)));
    }
    let nodes: Vec<Node> = std::iter::once(Node::Base)
        .chain(tours.iter().map(|&t| Node::Tour(t)))
        .collect();

    // position on tour j where it meets neighbor i (the base for vb)
    let meet = |j: TourId, i: Node| -> f64 {
        let t = graph.tour(j).expect("known tour");
        match i {
            Node::Base => t.base().expect("root has a base"),
            Node::Tour(i) => t.meeting(i).expect("graph edges carry meetings"),
        }
    };

    let mut out = String::new();
    let _ = writeln!(out, "\\ minimum worst-delay tree and direction selection");
    let _ = writeln!(out, "\\ tours: {}, arcs: {}", tours.len(), arcs.len());
    out.push_str("Minimize\n obj: z\nSubject To\n");

    let mut binaries = Vec::new();
    for &(a, b) in &arcs {
        binaries.push(x(a, b));
    }
    for &j in &tours {
        for d in Direction::BOTH {
            binaries.push(u(j, d));
        }
    }

    for &c in &tours {
        for &v in &nodes {
            let mut terms = Vec::new();
            for &(a, b) in &arcs {
                if b == v {
                    terms.push((1.0, f(a, b, c)));
                }
            }
            for &(a, b) in &arcs {
                if a == v {
                    terms.push((-1.0, f(a, b, c)));
                }
            }
            match v {
                Node::Base => constraint(&mut out, &format!("src_c{c}"), &terms, "=", -1.0),
                Node::Tour(t) if t == c => constraint(&mut out, &format!("sink_c{c}"), &terms, "=", 1.0),
                Node::Tour(t) => constraint(&mut out, &format!("cons_t{t}_c{c}"), &terms, "=", 0.0),
            }
        }
    }

    for &c in &tours {
        for &(a, b) in &arcs {
            let terms = [(1.0, f(a, b, c)), (-1.0, x(a, b))];
            constraint(
                &mut out,
                &format!("cap_{}_{}_c{c}", a.name(), b.name()),
                &terms,
                "<=",
                0.0,
            );
        }
    }

    let card: Vec<(f64, String)> = arcs.iter().map(|&(a, b)| (1.0, x(a, b))).collect();
    constraint(&mut out, "tree_card", &card, "=", tours.len() as f64);

    for &j in &tours {
        let terms = [(1.0, u(j, Direction::Cw)), (1.0, u(j, Direction::Ccw))];
        constraint(&mut out, &format!("dir_t{j}"), &terms, "=", 1.0);
    }

    let mut linearization = String::new();
    for &c in &tours {
        let mut delay = vec![(1.0, format!("z_c{c}"))];
        // own data of c, depending on its parent j and its direction
        for &(j, cc) in &arcs {
            if cc != Node::Tour(c) {
                continue;
            }
            let tour = graph.tour(c)?;
            for d in Direction::BOTH {
                let var = format!("o_{}_t{c}_{d}", j.name());
                let coef = tour.own_delay(meet(c, j), d);
                if coef != 0.0 {
                    delay.push((-coef, var.clone()));
                }
                let flow = f(j, cc, c);
                constraint(
                    &mut linearization,
                    &format!("{var}_a"),
                    &[(1.0, var.clone()), (-1.0, flow.clone())],
                    "<=",
                    0.0,
                );
                constraint(
                    &mut linearization,
                    &format!("{var}_b"),
                    &[(1.0, var.clone()), (-1.0, u(c, d))],
                    "<=",
                    0.0,
                );
                constraint(
                    &mut linearization,
                    &format!("{var}_c"),
                    &[(1.0, var.clone()), (-1.0, flow), (-1.0, u(c, d))],
                    ">=",
                    -1.0,
                );
            }
        }
        // transit over tour j between child k and parent i
        for &(i, jn) in &arcs {
            let Node::Tour(j) = jn else { continue };
            for &(j2, k) in &arcs {
                if j2 != jn || k == i || k == Node::Base {
                    continue;
                }
                let Node::Tour(kt) = k else { unreachable!() };
                let tour = graph.tour(j)?;
                for d in Direction::BOTH {
                    let var = format!("p_{}_t{j}_t{kt}_c{c}_{d}", i.name());
                    let coef = tour.arc(meet(j, k), meet(j, i), d);
                    if coef != 0.0 {
                        delay.push((-coef, var.clone()));
                    }
                    let (fij, fjk) = (f(i, jn, c), f(jn, k, c));
                    let lin = &mut linearization;
                    constraint(
                        lin,
                        &format!("{var}_a"),
                        &[(1.0, var.clone()), (-1.0, fij.clone())],
                        "<=",
                        0.0,
                    );
                    constraint(
                        lin,
                        &format!("{var}_b"),
                        &[(1.0, var.clone()), (-1.0, fjk.clone())],
                        "<=",
                        0.0,
                    );
                    constraint(
                        lin,
                        &format!("{var}_c"),
                        &[(1.0, var.clone()), (-1.0, u(j, d))],
                        "<=",
                        0.0,
                    );
                    constraint(
                        lin,
                        &format!("{var}_d"),
                        &[(1.0, var.clone()), (-1.0, fij), (-1.0, fjk), (-1.0, u(j, d))],
                        ">=",
                        -2.0,
                    );
                }
            }
        }
        constraint(&mut out, &format!("delay_c{c}"), &delay, "=", 0.0);
        constraint(
            &mut out,
            &format!("zmax_c{c}"),
            &[(1.0, format!("z_c{c}")), (-1.0, "z".into())],
            "<=",
            0.0,
        );
    }
    out.push_str(&linearization);

    out.push_str("Bounds\n");
    let _ = writeln!(out, " z >= 0");
    out.push_str("Binaries\n");
    for b in binaries {
        let _ = writeln!(out, " {b}");
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::Tour;

    #[test]
    fn single_tour_model() {
        let t = Tour::new(TourId(0), 5.0).unwrap().with_base(0.0).unwrap();
        let g = TourGraph::new([t], TourId(0)).unwrap();
        let lp = emit_milp(&g).unwrap();
        assert!(lp.contains(" tree_card: x_vb_t0 + x_t0_vb = 1\n"));
        assert!(lp.contains(" src_c0:"));
        assert!(lp.contains(" sink_c0:"));
        assert!(!lp.contains("cons_"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn long_constraints_wrap() {
        let mut s = String::new();
        let terms: Vec<(f64, String)> = (0..40).map(|i| (1.0, format!("variable_{i}"))).collect();
        constraint(&mut s, "long", &terms, "<=", 3.0);
        assert!(s.lines().count() > 1);
        assert!(s.lines().all(|l| l.len() <= LINE + 20));
    }
}
