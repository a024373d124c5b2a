use crate::tour::TourId;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("position {position} is outside [0, {length}) on tour {tour}")]
    PositionOutOfRange { tour: TourId, position: f64, length: f64 },
    #[error("tour {0} has no sensing locations")]
    NoSensing(TourId),
    #[error("invalid tour {tour}: {reason}")]
    InvalidTour { tour: TourId, reason: String },
    #[error("unknown tour {0}")]
    UnknownTour(TourId),
    #[error("invalid tour graph: {0}")]
    InvalidGraph(String),
    #[error("invalid tour tree: {0}")]
    InvalidTree(String),
    #[error("graph is disconnected; unreachable tours: {0:?}")]
    Disconnected(Vec<TourId>),
    #[error("instance has {size} tours, exceeding the exhaustive-search cap of {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("repeated-schedule inequality violated for tour {0}")]
    RepeatedSchedule(TourId),
    #[error("invalid formula: {0}")]
    Formula(String),
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("unbounded delay: {0}")]
    UnboundedDelay(String),
    #[error("scenario format error: {0}")]
    Format(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
