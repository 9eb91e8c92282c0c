use thiserror::Error;

use crate::model::{NodeId, Vpn};

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid address: page {0} is outside the footprint")]
    InvalidAddress(Vpn),

    #[error("nothing to evict on node {0}")]
    NothingToEvict(NodeId),

    #[error("page {vpn} is not resident on node {node}")]
    NotResident { vpn: Vpn, node: NodeId },

    #[error("node {0} is over capacity")]
    OverCapacity(NodeId),

    #[error("single-residency violation: page {0} is already resident")]
    DuplicatePage(Vpn),

    #[error("no preferred node: no remote faults since last reset")]
    NoPreference,

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid workload parameters: {0}")]
    InvalidWorkload(String),

    #[error("trace format: {0}")]
    TraceFormat(String),

    #[error("event log: {0}")]
    EventLog(String),

    #[error("invariant violation at event {event}: {detail}")]
    Invariant { event: u64, detail: String },

    #[error("cannot compare runs of different workloads ({0} vs {1})")]
    WorkloadMismatch(String, String),
}
