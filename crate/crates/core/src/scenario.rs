//! Versioned JSON scenario files.
//!
//! The canonical form is what [`ScenarioFile::to_json`] writes: fields in
//! declaration order, maps sorted by key, two-space indentation and a
//! trailing newline. Parsing and re-emitting a canonical file reproduces it
//! byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{CellLoop, GridScenario};
use crate::meeting::SelectionTrace;
use crate::tour::{Direction, Tour, TourGraph, TourId, TourMultiGraph, TourTree};
use crate::trees::{Method, SolveResult};

pub const FORMAT: &str = "tour-patrol-scenario";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TourRecord {
    pub id: TourId,
    pub length: f64,
    /// Half-open CCW intervals `[start, end)`.
    pub sensing: Vec<(f64, f64)>,
    #[serde(default)]
    pub meetings: BTreeMap<TourId, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateRecord {
    /// Lower id first.
    pub pair: (TourId, TourId),
    /// `(position on the first tour, position on the second)`.
    pub options: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRecord {
    pub scenario: GridScenario,
    /// Loop `i` is the walk of tour `i`.
    pub loops: Vec<CellLoop>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleRow {
    pub tour: TourId,
    pub start: f64,
    pub direction: Direction,
    pub start_wait: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub method: Method,
    /// Tree arcs as child to parent.
    pub parents: BTreeMap<TourId, TourId>,
    pub directions: BTreeMap<TourId, Direction>,
    /// Checked against the recomputed value on load.
    pub worst_delay: f64,
    /// Checked against the recomputed value on load.
    pub worst_idleness: f64,
    /// Recomputed on load.
    pub schedule: Vec<ScheduleRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionRecord {
    pub pair: (TourId, TourId),
    pub chosen: usize,
    pub distance: f64,
    pub candidate_distances: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format: String,
    pub version: u32,
    /// What produced the scenario, for humans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub root: TourId,
    pub tours: Vec<TourRecord>,
    /// Directions every solver must keep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_directions: Option<BTreeMap<TourId, Direction>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<SelectionRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionRecord>,
}

fn record(t: &Tour) -> TourRecord {
    TourRecord {
        id: t.id(),
        length: t.length(),
        sensing: t.sensing_arcs().iter().map(|a| (a.start, a.end)).collect(),
        meetings: t.meetings().clone(),
        base: t.base(),
    }
}

impl ScenarioFile {
    fn empty(root: TourId, tours: Vec<TourRecord>) -> ScenarioFile {
        ScenarioFile {
            format: FORMAT.into(),
            version: VERSION,
            source: None,
            root,
            tours,
            fixed_directions: None,
            candidates: None,
            grid: None,
            selection: None,
            solution: None,
        }
    }

    pub fn from_graph(graph: &TourGraph) -> ScenarioFile {
        ScenarioFile::empty(graph.root(), graph.tours().map(record).collect())
    }

    pub fn from_multigraph(mg: &TourMultiGraph) -> ScenarioFile {
        let mut f = ScenarioFile::empty(mg.root(), mg.tours().map(record).collect());
        f.candidates = Some(
            mg.candidates()
                .iter()
                .map(|(&pair, options)| CandidateRecord {
                    pair,
                    options: options.clone(),
                })
                .collect(),
        );
        f
    }

    pub fn with_source(mut self, source: impl Into<String>) -> ScenarioFile {
        self.source = Some(source.into());
        self
    }

    pub fn with_fixed_directions(mut self, directions: BTreeMap<TourId, Direction>) -> ScenarioFile {
        self.fixed_directions = Some(directions);
        self
    }

    pub fn with_grid(mut self, grid: &GridScenario, loops: &[CellLoop]) -> ScenarioFile {
        self.grid = Some(GridRecord {
            scenario: grid.clone(),
            loops: loops.to_vec(),
        });
        self
    }

    /// Stores the resolved meeting points of `graph` and the selection
    /// trace, keeping the candidate lists.
    pub fn with_selection(mut self, graph: &TourGraph, trace: &SelectionTrace) -> ScenarioFile {
        self.tours = graph.tours().map(record).collect();
        self.selection = Some(
            trace
                .chosen
                .iter()
                .map(|(&pair, &chosen)| SelectionRecord {
                    pair,
                    chosen,
                    distance: trace.rationale[&pair],
                    candidate_distances: trace.candidate_distances[&pair].clone(),
                })
                .collect(),
        );
        self
    }

    pub fn with_solution(mut self, s: &SolveResult) -> ScenarioFile {
        self.solution = Some(SolutionRecord {
            method: s.method,
            parents: s.tree.parents().clone(),
            directions: s.directions.clone(),
            worst_delay: s.report.worst_delay,
            worst_idleness: s.report.worst_idleness,
            schedule: s
                .schedule
                .tours
                .iter()
                .map(|(&tour, t)| ScheduleRow {
                    tour,
                    start: t.start,
                    direction: t.direction,
                    start_wait: t.start_wait,
                    tau: t.tau,
                })
                .collect(),
        });
        self
    }

    fn build_tours(&self, with_meetings: bool) -> Result<Vec<Tour>> {
        let mut out = Vec::with_capacity(self.tours.len());
        for r in &self.tours {
            let mut t = Tour::new(r.id, r.length)?;
            if r.sensing.is_empty() {
                t = t.relay_only();
            } else if !(r.sensing.len() == 1 && r.sensing[0] == (0.0, r.length)) {
                t = t.with_sensing(&r.sensing)?;
            }
            if with_meetings {
                for (&nb, &p) in &r.meetings {
                    t = t.with_meeting(nb, p)?;
                }
            }
            if let Some(b) = r.base {
                t = t.with_base(b)?;
            }
            out.push(t);
        }
        Ok(out)
    }

    /// Whether every tour pair is resolved to a single meeting point.
    pub fn is_resolved(&self) -> bool {
        self.tours.iter().any(|t| !t.meetings.is_empty()) || self.tours.len() == 1
    }

    pub fn graph(&self) -> Result<TourGraph> {
        if !self.is_resolved() {
            return Err(Error::Format("scenario has no resolved meeting points".into()));
        }
        TourGraph::new(self.build_tours(true)?, self.root)
    }

    pub fn multigraph(&self) -> Result<TourMultiGraph> {
        let list = self
            .candidates
            .as_ref()
            .ok_or_else(|| Error::Format("scenario has no candidate meeting points".into()))?;
        let candidates = list.iter().map(|c| (c.pair, c.options.clone())).collect();
        TourMultiGraph::new(self.build_tours(false)?, candidates, self.root)
    }

    /// The stored solution, rebuilt on the stored graph.
    pub fn solution(&self) -> Result<Option<SolveResult>> {
        let Some(s) = &self.solution else {
            return Ok(None);
        };
        let graph = self.graph()?;
        let tree = TourTree::from_parents(&graph, s.parents.clone())?;
        let solved = SolveResult::assemble(s.method, tree, s.directions.clone())?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        if !close(solved.worst_delay(), s.worst_delay) || !close(solved.worst_idleness(), s.worst_idleness) {
            return Err(Error::Format(format!(
                "stored solution values (WD {}, WI {}) do not match the recomputed ones (WD {}, WI {})",
                s.worst_delay,
                s.worst_idleness,
                solved.worst_delay(),
                solved.worst_idleness()
            )));
        }
        Ok(Some(solved))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ScenarioFile> {
        let f: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if f.format != FORMAT {
            return Err(Error::Format(format!(
                "expected format {FORMAT:?}, found {:?}",
                f.format
            )));
        }
        if f.version != VERSION {
            return Err(Error::Format(format!("unsupported version {}", f.version)));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{sample_tree, sat};
    use crate::trees::mdtd_cg;

    #[test]
    fn graph_round_trip() {
        let g = sample_tree();
        let text = ScenarioFile::from_graph(&g).to_json();
        let back = ScenarioFile::from_json(&text).unwrap();
        assert_eq!(back.graph().unwrap(), g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn solution_round_trip() {
        let (g, dirs, _) = sat::gen_3sat_mdt(&sat::Formula::example()).unwrap();
        let s = mdtd_cg(&g).unwrap();
        let text = ScenarioFile::from_graph(&g)
            .with_source("3sat example")
            .with_fixed_directions(dirs)
            .with_solution(&s)
            .to_json();
        let back = ScenarioFile::from_json(&text).unwrap();
        assert_eq!(back.solution().unwrap().unwrap(), s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn edited_solution_values_are_rejected() {
        let g = sample_tree();
        let mut f = ScenarioFile::from_graph(&g).with_solution(&mdtd_cg(&g).unwrap());
        f.solution.as_mut().unwrap().worst_delay -= 1.0;
        assert!(matches!(f.solution(), Err(Error::Format(_))));
    }

    #[test]
    fn partial_sensing_survives() {
        let t = Tour::new(TourId(0), 10.0)
            .unwrap()
            .with_sensing(&[(8.0, 2.0)])
            .unwrap()
            .with_base(1.0)
            .unwrap();
        let g = TourGraph::new([t], TourId(0)).unwrap();
        let back = ScenarioFile::from_json(&ScenarioFile::from_graph(&g).to_json()).unwrap();
        assert_eq!(back.graph().unwrap(), g);
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(matches!(ScenarioFile::from_json("{}"), Err(Error::Format(_))));
        let mut f = ScenarioFile::from_graph(&sample_tree());
        f.version = 2;
        assert!(matches!(ScenarioFile::from_json(&f.to_json()), Err(Error::Format(_))));
    }
}
