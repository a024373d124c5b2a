//! Minimum-delay schedules on a fixed tour tree.
//!
//! Data captured on a tour rides with its robot until the robot meets its
//! parent at its start position, then rides with the parent, and so on up
//! to the base station. The delay of a branch therefore decomposes into the
//! loop time on each tour plus the parent's travel from the child's meeting
//! point back to its own start.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tour::{Direction, Tour, TourGraph, TourId, TourTree, EPS};

#[derive(Clone, Debug, PartialEq)]
pub struct TourSchedule {
    pub start: f64,
    pub direction: Direction,
    /// Wait at the start position before the first departure.
    pub start_wait: f64,
    /// Loop length plus start wait.
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub tours: BTreeMap<TourId, TourSchedule>,
    /// Longest loop time; every robot repeats with this period.
    pub period: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelayReport {
    pub worst_delay: f64,
    pub worst_idleness: f64,
    /// Worst delay of the branch rooted at each tour, measured until the
    /// data reaches that tour's start position.
    pub branch_delay: BTreeMap<TourId, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedSchedule {
    pub schedule: Schedule,
    pub vbar: TourId,
    pub gamma: f64,
}

impl RepeatedSchedule {
    pub fn worst_idleness(&self) -> f64 {
        self.schedule.period + self.gamma
    }
}

/// Offset along direction `d` from `start` to the meeting point `meet`.
/// A child met at the start position is served at the end of the loop, so
/// a zero offset counts as a full loop.
pub fn child_offset(tour: &Tour, start: f64, meet: f64, d: Direction) -> f64 {
    let off = tour.arc(start, meet, d);
    if off < EPS {
        tour.length()
    } else {
        off
    }
}

/// Borrowed tree structure shared by the public entry points and the
/// exhaustive search, which evaluates trees without materializing them.
pub(crate) struct Shape<'a> {
    pub graph: &'a TourGraph,
    pub parent: &'a BTreeMap<TourId, TourId>,
    pub children: &'a BTreeMap<TourId, Vec<TourId>>,
    /// Children before parents.
    pub order: &'a [TourId],
}

impl Shape<'_> {
    fn start(&self, v: TourId) -> Result<f64> {
        let t = self.graph.tour(v)?;
        let pos = match self.parent.get(&v) {
            Some(&p) => t.meeting(p),
            None => t.base(),
        };
        pos.ok_or_else(|| Error::InvalidTree(format!("tour {v} lacks its start position")))
    }

    fn kids(&self, v: TourId) -> &[TourId] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    fn cost(&self, v: TourId, d: Direction, branch: &BTreeMap<TourId, f64>) -> Result<f64> {
        let t = self.graph.tour(v)?;
        let start = self.start(v)?;
        let mut worst = t.own_delay(start, d);
        for &w in self.kids(v) {
            let meet = t
                .meeting(w)
                .ok_or_else(|| Error::InvalidTree(format!("tour {v} lacks a meeting point with {w}")))?;
            let back = t.length() - child_offset(t, start, meet, d);
            worst = worst.max(branch[&w] + back);
        }
        Ok(worst)
    }

    /// Branch delays bottom-up. With `fixed`, directions are taken from it;
    /// otherwise each tour picks the direction minimizing its branch delay,
    /// clockwise on ties.
    pub fn solve(
        &self,
        fixed: Option<&BTreeMap<TourId, Direction>>,
    ) -> Result<(BTreeMap<TourId, Direction>, BTreeMap<TourId, f64>)> {
        let mut dirs = BTreeMap::new();
        let mut branch = BTreeMap::new();
        for &v in self.order {
            let (d, m) = match fixed {
                Some(map) => {
                    let d = *map
                        .get(&v)
                        .ok_or_else(|| Error::InvalidTree(format!("no direction for tour {v}")))?;
                    (d, self.cost(v, d, &branch)?)
                }
                None => {
                    let cw = self.cost(v, Direction::Cw, &branch)?;
                    let ccw = self.cost(v, Direction::Ccw, &branch)?;
                    if cw <= ccw {
                        (Direction::Cw, cw)
                    } else {
                        (Direction::Ccw, ccw)
                    }
                }
            };
            dirs.insert(v, d);
            branch.insert(v, m);
        }
        Ok((dirs, branch))
    }

    /// Like [`Shape::solve`] but only the directions missing from `partial`
    /// are chosen.
    pub fn complete(
        &self,
        partial: &BTreeMap<TourId, Direction>,
    ) -> Result<(BTreeMap<TourId, Direction>, BTreeMap<TourId, f64>)> {
        let mut dirs = BTreeMap::new();
        let mut branch = BTreeMap::new();
        for &v in self.order {
            let (d, m) = match partial.get(&v) {
                Some(&d) => (d, self.cost(v, d, &branch)?),
                None => {
                    let cw = self.cost(v, Direction::Cw, &branch)?;
                    let ccw = self.cost(v, Direction::Ccw, &branch)?;
                    if cw <= ccw {
                        (Direction::Cw, cw)
                    } else {
                        (Direction::Ccw, ccw)
                    }
                }
            };
            dirs.insert(v, d);
            branch.insert(v, m);
        }
        Ok((dirs, branch))
    }

    fn root(&self) -> TourId {
        self.graph.root()
    }
}

pub(crate) fn with_shape<T>(tree: &TourTree, f: impl FnOnce(&Shape<'_>) -> T) -> T {
    let order = tree.post_order();
    let shape = Shape {
        graph: tree.graph(),
        parent: tree.parents(),
        children: tree.children_map(),
        order: &order,
    };
    f(&shape)
}

fn report(graph: &TourGraph, root: TourId, branch: BTreeMap<TourId, f64>) -> DelayReport {
    DelayReport {
        worst_delay: branch[&root],
        worst_idleness: graph.max_length(),
        branch_delay: branch,
    }
}

/// Worst delay and idleness of a tree under fixed directions.
pub fn evaluate_tree_delay(tree: &TourTree, directions: &BTreeMap<TourId, Direction>) -> Result<DelayReport> {
    with_shape(tree, |shape| {
        let (_, branch) = shape.solve(Some(directions))?;
        Ok(report(shape.graph, shape.root(), branch))
    })
}

/// Directions minimizing the worst delay of `tree` and the schedule that
/// realizes it.
pub fn minimum_delay_schedule(tree: &TourTree) -> Result<(Schedule, DelayReport)> {
    let (dirs, branch) = with_shape(tree, |shape| shape.solve(None))?;
    let schedule = build_schedule(tree, &dirs)?;
    Ok((schedule, report(tree.graph(), tree.root(), branch)))
}

/// Schedule for given directions: each child starts so that it returns to
/// its meeting point exactly when the parent passes it, without stops.
pub fn build_schedule(tree: &TourTree, directions: &BTreeMap<TourId, Direction>) -> Result<Schedule> {
    let mut waits = BTreeMap::from([(tree.root(), 0.0)]);
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        let t = tree.tour(v)?;
        let start = tree.start_position(v)?;
        let d = directions[&v];
        for &w in tree.children(v) {
            let meet = t.meeting(w).expect("tree tours carry child meetings");
            let lead = child_offset(t, start, meet, d) - tree.tour(w)?.length();
            waits.insert(w, waits[&v] + lead);
            stack.push(w);
        }
    }
    let shift = waits.values().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let mut tours = BTreeMap::new();
    for (&v, &w) in &waits {
        let wait = w - shift;
        tours.insert(
            v,
            TourSchedule {
                start: tree.start_position(v)?,
                direction: directions[&v],
                start_wait: wait,
                tau: tree.tour(v)?.length() + wait,
            },
        );
    }
    Ok(Schedule {
        tours,
        period: tree.graph().max_length(),
    })
}

/// Repeats `schedule` with the longest tour as reference and no slack.
pub fn make_repeated_schedule(schedule: &Schedule) -> Result<RepeatedSchedule> {
    let (vbar, reference) = schedule
        .tours
        .iter()
        .map(|(&v, s)| (v, s))
        .fold(None::<(TourId, &TourSchedule)>, |best, (v, s)| match best {
            Some((_, b)) if b.tau - b.start_wait >= s.tau - s.start_wait => best,
            _ => Some((v, s)),
        })
        .ok_or_else(|| Error::InvalidTree("empty schedule".into()))?;
    let gamma = 0.0;
    for (&w, s) in &schedule.tours {
        let lead = s.start_wait - reference.start_wait;
        if s.tau > reference.tau + lead + gamma + EPS {
            return Err(Error::RepeatedSchedule(w));
        }
    }
    Ok(RepeatedSchedule {
        schedule: schedule.clone(),
        vbar,
        gamma,
    })
}

impl Schedule {
    /// Plain-text table with one row per tour.
    pub fn table(&self) -> String {
        let mut out = String::from("tour  start      dir  wait       tau\n");
        for (v, s) in &self.tours {
            let _ = writeln!(
                out,
                "{:<5} {:<10} {:<4} {:<10} {}",
                v.0,
                fmt_num(s.start),
                s.direction,
                fmt_num(s.start_wait),
                fmt_num(s.tau)
            );
        }
        out
    }

    pub fn directions(&self) -> BTreeMap<TourId, Direction> {
        self.tours.iter().map(|(&v, s)| (v, s.direction)).collect()
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        format!("{}", r as i64)
    } else {
        format!("{x:.6}")
    }
}
