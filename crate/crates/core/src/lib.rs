//! Planning and simulation of multi-robot patrolling on closed tours.
//!
//! Each robot repeatedly traverses its own tour. Neighboring robots meet at
//! fixed points and hand over captured data, which is relayed robot to robot
//! until it reaches the base station. The crate selects a spanning tree of
//! hand-over relations and robot directions that minimize the worst data
//! delay, executes the resulting schedule in an event-driven simulator and
//! generates the instance families used to evaluate the planners.

pub mod converted;
pub mod error;
pub mod experiment;
pub mod export;
pub mod gen;
pub mod meeting;
pub mod par;
pub mod scenario;
pub mod schedule;
pub mod sim;
pub mod tour;
pub mod trees;

pub use error::{Error, Result};
pub use par::Execution;
pub use schedule::{
    evaluate_tree_delay, make_repeated_schedule, minimum_delay_schedule, DelayReport, RepeatedSchedule, Schedule,
};
pub use tour::{Direction, Tour, TourGraph, TourId, TourMultiGraph, TourTree, Violation, EPS};
pub use trees::{Method, SolveResult};
