use thiserror::Error;

use crate::master::Schedule;
use crate::model::{NodeId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes, used by the CLI and the C bindings to pick exit and
/// status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Validation,
    Resource,
    Solver,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("invalid network graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("path enumeration exceeded the cap of {cap} paths")]
    PathCap { cap: usize },

    #[error("{what} has {actual} entries, above the limit of {limit}")]
    SizeCap {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("weight domain error: {0}")]
    Domain(String),

    #[error("pair ({transmitter}, {receiver}) is not a realizable link")]
    UnrealizableLink {
        transmitter: NodeId,
        receiver: NodeId,
    },

    #[error("invalid TR-path: {0}")]
    InvalidPath(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("flow does not decompose into TR-paths; {} selected edge(s) left over", .leftover.len())]
    Decomposition { leftover: Vec<usize> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("LP solver failed: {0}")]
    Numerical(String),

    #[error("pricing exhausted its budget of {budget} branch-and-bound nodes")]
    PricingBudget { budget: u64 },

    #[error("column generation hit the iteration cap of {cap}; best objective so far {}", .best.objective)]
    IterationCap { cap: usize, best: Box<Schedule> },

    #[error("column generation stalled: pricing returned a column already in the pool with value {value} > threshold {threshold}")]
    Stall { value: f64, threshold: f64 },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate generator spec: {rejected} of the last {window} instances had no realizable link")]
    DegenerateSpec { rejected: usize, window: usize },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) => ErrorClass::Parse,
            Error::InvalidGraph(_)
            | Error::UnknownNode(_)
            | Error::Domain(_)
            | Error::UnrealizableLink { .. }
            | Error::InvalidPath(_)
            | Error::InvalidConfiguration(_)
            | Error::Decomposition { .. }
            | Error::Precondition(_)
            | Error::InvalidSpec(_)
            | Error::DegenerateSpec { .. } => ErrorClass::Validation,
            Error::PathCap { .. }
            | Error::SizeCap { .. }
            | Error::PricingBudget { .. }
            | Error::IterationCap { .. } => ErrorClass::Resource,
            Error::Numerical(_) | Error::Stall { .. } => ErrorClass::Solver,
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
