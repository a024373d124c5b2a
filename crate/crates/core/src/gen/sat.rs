//! 3-CNF formulas and their reduction to tree selection with fixed
//! directions: the formula is satisfiable iff some spanning tree reaches a
//! worst delay of 4.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::tour::{Direction, Tour, TourGraph, TourId};

/// A literal: variable index (from 1) and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub vars: u32,
    pub clauses: Vec<[Literal; 3]>,
}

/// The worked example with clauses `{x1, x2, x3}`, `{!x1, !x2, x4}` and
/// `{x2, !x3, !x4}`.
pub const EXAMPLE: &str = "x1 x2 x3 & !x1 !x2 x4 & x2 !x3 !x4";

impl Formula {
    pub fn new(clauses: Vec<[Literal; 3]>) -> Result<Formula> {
        if clauses.is_empty() {
            return Err(Error::Formula("no clauses".into()));
        }
        let mut vars = 0;
        for c in &clauses {
            for l in c {
                if l.var == 0 {
                    return Err(Error::Formula("variables are numbered from 1".into()));
                }
                vars = vars.max(l.var);
            }
            for a in c {
                if c.iter().any(|b| b.var == a.var && b.positive != a.positive) {
                    return Err(Error::Formula(format!("clause contains x{} and its negation", a.var)));
                }
            }
        }
        Ok(Formula { vars, clauses })
    }

    pub fn example() -> Formula {
        EXAMPLE.parse().expect("example parses")
    }

    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| ((assignment >> (l.var - 1)) & 1 == 1) == l.positive))
    }

    /// Exhaustive satisfiability check.
    pub fn satisfiable(&self) -> bool {
        (0..1u64 << self.vars).any(|a| self.eval(a))
    }

    /// Random formula over up to `max_vars` variables with up to
    /// `max_clauses` clauses; literals may repeat a variable with the same
    /// sign, so short unsatisfiable formulas occur.
    pub fn random<R: Rng>(rng: &mut R, max_vars: u32, max_clauses: usize) -> Formula {
        let vars = rng.gen_range(1..=max_vars);
        let count = rng.gen_range(1..=max_clauses);
        loop {
            let clauses: Vec<[Literal; 3]> = (0..count)
                .map(|_| {
                    [(); 3].map(|_| Literal {
                        var: rng.gen_range(1..=vars),
                        positive: rng.gen_bool(0.5),
                    })
                })
                .collect();
            if let Ok(f) = Formula::new(clauses) {
                return f;
            }
        }
    }
}

impl FromStr for Formula {
    type Err = Error;

    /// Clauses separated by `&`, literals by whitespace or commas, negation
    /// by `!`, `~` or `-`. `example` (or its alias `paper-example`) names
    /// [`EXAMPLE`].
    fn from_str(s: &str) -> Result<Formula> {
        let s = if matches!(s.trim(), "example" | "paper-example") {
            EXAMPLE
        } else {
            s
        };
        let mut clauses = Vec::new();
        for part in s.split('&') {
            let lits: Vec<&str> = part
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect();
            if lits.len() != 3 {
                return Err(Error::Formula(format!(
                    "clause {:?} does not have exactly 3 literals",
                    part.trim()
                )));
            }
            let mut clause = [Literal { var: 0, positive: true }; 3];
            for (slot, lit) in clause.iter_mut().zip(lits) {
                let (positive, name) = match lit.strip_prefix(['!', '~', '-']) {
                    Some(rest) => (false, rest),
                    None => (true, lit),
                };
                let var = name
                    .strip_prefix('x')
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| Error::Formula(format!("bad literal {lit:?}")))?;
                *slot = Literal { var, positive };
            }
            clauses.push(clause);
        }
        Formula::new(clauses)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}x{}", if l.positive { "" } else { "!" }, l.var)?;
            }
        }
        Ok(())
    }
}

/// Tour ids used by [`gen_3sat_mdt`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatLayout {
    pub hub: TourId,
    pub pos: TourId,
    pub neg: TourId,
    pub vars: Vec<TourId>,
    pub clauses: Vec<TourId>,
}

/// Reduction of a 3-CNF formula to tree selection. All tours have length
/// 2, are fully sensed and run counterclockwise:
///
/// * the hub carries the base at 0 and meets the two literal tours at 1;
/// * each literal tour meets the hub at 0 and every variable at 1;
/// * variable `i` meets the positive literal tour at 0 and the negative
///   one at 1; clauses containing `xi` meet it at 0, those with `!xi` at 1;
/// * clause tours meet their distinct variables at 0, 2/3 and 4/3.
pub fn gen_3sat_mdt(formula: &Formula) -> Result<(TourGraph, BTreeMap<TourId, Direction>, SatLayout)> {
    let layout = SatLayout {
        hub: TourId(0),
        pos: TourId(1),
        neg: TourId(2),
        vars: (0..formula.vars).map(|i| TourId(3 + i)).collect(),
        clauses: (0..formula.clauses.len() as u32)
            .map(|j| TourId(3 + formula.vars + j))
            .collect(),
    };
    let mut tours: BTreeMap<TourId, Tour> = BTreeMap::new();
    let all = [layout.hub, layout.pos, layout.neg]
        .into_iter()
        .chain(layout.vars.iter().copied())
        .chain(layout.clauses.iter().copied());
    for id in all {
        tours.insert(id, Tour::new(id, 2.0)?);
    }
    let mut meet = |a: TourId, b: TourId, pa: f64, pb: f64| -> Result<()> {
        let t = tours.remove(&a).expect("known tour").with_meeting(b, pa)?;
        tours.insert(a, t);
        let t = tours.remove(&b).expect("known tour").with_meeting(a, pb)?;
        tours.insert(b, t);
        Ok(())
    };
    meet(layout.hub, layout.pos, 1.0, 0.0)?;
    meet(layout.hub, layout.neg, 1.0, 0.0)?;
    for &v in &layout.vars {
        meet(layout.pos, v, 1.0, 0.0)?;
        meet(layout.neg, v, 1.0, 1.0)?;
    }
    for (j, clause) in formula.clauses.iter().enumerate() {
        let mut seen = Vec::new();
        for l in clause {
            if seen.contains(&l.var) {
                continue;
            }
            let slot = seen.len() as f64 * 2.0 / 3.0;
            seen.push(l.var);
            let on_var = if l.positive { 0.0 } else { 1.0 };
            meet(layout.clauses[j], layout.vars[l.var as usize - 1], slot, on_var)?;
        }
    }
    let hub = tours.remove(&layout.hub).expect("hub exists").with_base(0.0)?;
    tours.insert(layout.hub, hub);
    let graph = TourGraph::new(tours.into_values(), layout.hub)?;
    let dirs = graph.tour_ids().map(|t| (t, Direction::Ccw)).collect();
    Ok((graph, dirs, layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_has_ten_tours() {
        let f = Formula::example();
        assert_eq!(f.vars, 4);
        assert_eq!(f.to_string(), EXAMPLE);
        let (g, dirs, _) = gen_3sat_mdt(&f).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g.edges().len(), 2 + 2 * 4 + 9);
        assert!(dirs.values().all(|&d| d == Direction::Ccw));
        for name in ["example", "paper-example", " example "] {
            assert_eq!(name.parse::<Formula>().unwrap(), f);
        }
    }

    #[test]
    fn parse_errors() {
        assert!("x1 x2".parse::<Formula>().is_err());
        assert!("x1 y2 x3".parse::<Formula>().is_err());
        assert!("x1 !x1 x2".parse::<Formula>().is_err());
        assert!("x0 x1 x2".parse::<Formula>().is_err());
    }

    #[test]
    fn sat_check() {
        let f: Formula = "x1 x1 x1 & !x1 !x1 !x1".parse().unwrap();
        assert!(!f.satisfiable());
        assert!(Formula::example().satisfiable());
    }
}
