//! Trace-driven simulator of elastic scaling primitives (stretch, push,
//! pull, jump) over a cluster of memory-limited nodes.
//!
//! A workload generator produces a page-granular access trace; the engine
//! replays it against a cluster model, servicing remote faults by pulling
//! pages and, under a jump policy, moving execution to the node holding the
//! data. Every run reports simulated time, network bytes and event counts.

pub mod engine;
pub mod error;
pub mod model;
pub mod policy;
pub mod primitives;
pub mod workloads;

pub use engine::{
    compare, run, run_baseline, run_with_policy, ComparisonReport, Execution, Placement, RunConfig, RunOutcome,
};
pub use error::{Result, SimError};
pub use model::{CostModel, NodeId, RunMetrics, Vpn, Watermarks};
pub use policy::{JumpPolicy, PolicyDecision, PolicySpec, StateView};
pub use workloads::{AccessTrace, WorkloadKind, WorkloadParams};
