//! Spanning-tree selection on tour graphs.

mod cg;
mod exact;
mod milp;
mod sp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cg::{cg_lower_bound, cg_paths, mdtd_cg, mdtd_cg_raw, CgPaths};
pub use exact::{brute_force_optimal, brute_force_optimal_with, spanning_trees, ExactOptions, DEFAULT_CAP};
pub use milp::emit_milp;
pub use sp::mdtd_sp;

use crate::error::{Error, Result};
use crate::schedule::{build_schedule, evaluate_tree_delay, DelayReport, Schedule};
use crate::tour::{Direction, TourGraph, TourId, TourTree, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sp,
    Cg,
    Opt,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sp => "sp",
            Method::Cg => "cg",
            Method::Opt => "opt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "sp" => Ok(Method::Sp),
            "cg" => Ok(Method::Cg),
            "opt" => Ok(Method::Opt),
            other => Err(Error::Parameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub method: Method,
    pub tree: TourTree,
    pub directions: BTreeMap<TourId, Direction>,
    pub schedule: Schedule,
    pub report: DelayReport,
}

impl SolveResult {
    /// Bundles a tree and directions with their schedule and analytic report.
    pub fn assemble(method: Method, tree: TourTree, directions: BTreeMap<TourId, Direction>) -> Result<SolveResult> {
        let report = evaluate_tree_delay(&tree, &directions)?;
        let schedule = build_schedule(&tree, &directions)?;
        Ok(SolveResult {
            method,
            tree,
            directions,
            schedule,
            report,
        })
    }

    pub fn worst_delay(&self) -> f64 {
        self.report.worst_delay
    }

    pub fn worst_idleness(&self) -> f64 {
        self.report.worst_idleness
    }
}

/// Rejects graphs that violate the tour-graph invariants.
pub(crate) fn ensure_valid(graph: &TourGraph) -> Result<()> {
    let violations = graph.validate();
    if violations.is_empty() {
        return Ok(());
    }
    for v in &violations {
        if let Violation::Disconnected { unreachable } = v {
            return Err(Error::Disconnected(unreachable.clone()));
        }
    }
    let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Error::InvalidGraph(text.join("; ")))
}
