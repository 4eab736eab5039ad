use thiserror::Error;

/// Failures of the evaluation calculi.
///
/// These are domain errors: the inputs were well-formed but the requested
/// evaluation has no value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("event {event} is invalid: an event needs a predecessor tick")]
    InvalidEvent { event: String },

    #[error("event {event} does not occur in world {world}")]
    EventNotOccurring { event: String, world: String },

    #[error("no world other than {reference} lacks event {event}")]
    NoCounterfactualWorld { event: String, reference: String },

    #[error("no comparison world for {world}")]
    NoComparisonWorld { world: String },

    #[error("interval {interval} exceeds horizon {horizon} of world {world}")]
    IntervalOutOfRange { interval: String, world: String, horizon: u64 },

    #[error("activity {activity} has no role binding covering tick {time}")]
    UnboundActivity { activity: String, time: u64 },

    #[error("degenerate family: {reason}")]
    DegenerateFamily { reason: String },

    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },
}

impl EvalError {
    /// Stable name used in CLI messages and reports.
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::InvalidEvent { .. } => "InvalidEvent",
            EvalError::EventNotOccurring { .. } => "EventNotOccurring",
            EvalError::NoCounterfactualWorld { .. } => "NoCounterfactualWorld",
            EvalError::NoComparisonWorld { .. } => "NoComparisonWorld",
            EvalError::IntervalOutOfRange { .. } => "IntervalOutOfRange",
            EvalError::UnboundActivity { .. } => "UnboundActivity",
            EvalError::DegenerateFamily { .. } => "DegenerateFamily",
            EvalError::UnknownId { .. } => "UnknownId",
        }
    }
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;
