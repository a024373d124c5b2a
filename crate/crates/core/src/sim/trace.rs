use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tour::TourId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    /// First arrival at the start position.
    Ready,
    Arrive,
    Depart,
    WaitChild,
    MeetParent,
    MeetChild,
    Deliver,
    Disturb,
}

impl TraceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::Ready => "ready",
            TraceKind::Arrive => "arrive",
            TraceKind::Depart => "depart",
            TraceKind::WaitChild => "wait-child",
            TraceKind::MeetParent => "meet-parent",
            TraceKind::MeetChild => "meet-child",
            TraceKind::Deliver => "deliver",
            TraceKind::Disturb => "disturb",
        }
    }
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// One simulator event as exported to CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub robot: TourId,
    pub kind: TraceKind,
    pub position: f64,
    pub delta_t: f64,
}
