//! Cluster state: pages, nodes, the elastic page table, per-node
//! second-chance queues, the cost model and run metrics.

mod cluster;
mod cost;
mod ids;
mod metrics;
mod node;
mod queue;

pub use cluster::{Cluster, ElasticPageTable};
pub use cost::{CostModel, CostSampler, LatencyRange, KB, PAGE_SIZE};
pub use ids::{NodeId, Vpn};
pub use metrics::{Counts, JumpRecord, ResidencySample, RunMetrics};
pub use node::{NodeState, Watermarks};
pub use queue::ResidentQueue;
