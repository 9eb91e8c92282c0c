//! Drives a trace through the primitives under a jump policy.

mod eventlog;
mod exec;
mod sweep;

use log::debug;

use crate::error::{Result, SimError};
use crate::model::{Cluster, CostModel, CostSampler, NodeId, ResidencySample, RunMetrics, Watermarks};
use crate::policy::{JumpPolicy, PolicyDecision, PolicySpec};
use crate::primitives::{EventLog, Machine, SyncEvent};
use crate::workloads::AccessTrace;

pub use eventlog::{read_event_log, replay, write_event_log, LogHeader, Replay};
pub use exec::Execution;
pub use sweep::{depth_sweep, sweep_thresholds, sweep_thresholds_with, DepthRow, SweepReport, SweepRow};

/// How pages are laid out before the first access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    /// Everything starts on the home node. If it does not fit, the process
    /// stretches to every other node and the home node pushes its
    /// second-chance victims to the roomiest member until it is at its low
    /// watermark.
    HomeThenStretchBalance,
    /// Page `i` starts on node `placement[i]`; the process is stretched to
    /// every node other than home.
    Explicit(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Page capacity per node; node 0 is home.
    pub capacities: Vec<usize>,
    pub watermarks: Watermarks,
    pub cost: CostModel,
    pub policy: PolicySpec,
    pub placement: Placement,
    /// Seeds the latency jitter.
    pub seed: u64,
    /// Audit the whole cluster after every primitive.
    pub strict: bool,
    pub record_events: bool,
    /// Record per-node residency every this many accesses.
    pub sample_every: Option<u64>,
    /// Replays of the trace back to back.
    pub repeats: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::desk(PolicySpec::Never)
    }
}

impl RunConfig {
    /// Two nodes of 4096 pages with default costs.
    pub fn desk(policy: PolicySpec) -> Self {
        Self {
            capacities: vec![4096, 4096],
            watermarks: Watermarks::default(),
            cost: CostModel::default(),
            policy,
            placement: Placement::HomeThenStretchBalance,
            seed: 0,
            strict: false,
            record_events: false,
            sample_every: None,
            repeats: 1,
        }
    }

    pub fn with_policy(&self, policy: PolicySpec) -> Self {
        Self { policy, ..self.clone() }
    }

    pub fn total_capacity(&self) -> usize {
        self.capacities.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacities.is_empty() || self.capacities.contains(&0) {
            return Err(SimError::InvalidConfig("every node needs a positive capacity".into()));
        }
        if self.repeats == 0 {
            return Err(SimError::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.sample_every == Some(0) {
            return Err(SimError::InvalidConfig("sample_every must be positive".into()));
        }
        self.watermarks.validate()?;
        self.cost.validate()
    }
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub workload_id: String,
    pub policy: PolicySpec,
    pub metrics: RunMetrics,
    pub log: EventLog,
}

pub fn run(config: &RunConfig, trace: &AccessTrace) -> Result<RunOutcome> {
    let policy = config.policy.build()?;
    let (metrics, log) = run_with_policy(config, trace, policy.as_ref())?;
    Ok(RunOutcome { workload_id: trace.workload_id.clone(), policy: config.policy, metrics, log })
}

/// Network-swap baseline: the same run with jumping disabled.
pub fn run_baseline(config: &RunConfig, trace: &AccessTrace) -> Result<RunOutcome> {
    run(&config.with_policy(PolicySpec::Never), trace)
}

/// Builds the initial placement, charging any stretch and balancing costs to
/// the run.
fn setup(config: &RunConfig, footprint: usize) -> Result<Machine> {
    let home = NodeId::HOME;
    let costs = CostSampler::new(config.cost.clone(), config.seed);
    let others = (1..config.capacities.len()).map(|i| NodeId(i as u16));
    let mut m = match &config.placement {
        Placement::Explicit(p) => {
            if p.len() != footprint {
                return Err(SimError::InvalidConfig(format!(
                    "placement covers {} pages, footprint is {footprint}",
                    p.len()
                )));
            }
            let cluster = Cluster::with_placement(&config.capacities, config.watermarks, p)?;
            let mut m = Machine::new(cluster, home, costs, false, config.record_events);
            for n in others {
                m.stretch(n)?;
            }
            m
        }
        Placement::HomeThenStretchBalance if footprint <= config.capacities[0] => {
            let cluster =
                Cluster::with_placement(&config.capacities, config.watermarks, &vec![home; footprint])?;
            Machine::new(cluster, home, costs, false, config.record_events)
        }
        Placement::HomeThenStretchBalance => {
            let cluster = Cluster::staged_on(&config.capacities, config.watermarks, footprint, home)?;
            let mut m = Machine::new(cluster, home, costs, false, config.record_events);
            for n in others {
                m.stretch(n)?;
            }
            let low = m.cluster().node(home)?.low_pages();
            while m.cluster().node(home)?.residency() > low {
                let span = m.process().span.clone();
                let Some(dest) = m.cluster().roomiest(span) else { break };
                m.balance(dest, 1)?;
            }
            let h = m.cluster().node(home)?;
            if h.residency() > h.capacity() {
                return Err(SimError::InvalidConfig(format!(
                    "footprint of {footprint} pages does not fit the cluster"
                )));
            }
            m
        }
    };
    if config.strict {
        m.set_strict(true);
        m.cluster().audit().map_err(|e| SimError::Invariant { event: m.event_index(), detail: e })?;
    }
    Ok(m)
}

/// Runs `trace` under an arbitrary policy object.
pub fn run_with_policy(
    config: &RunConfig,
    trace: &AccessTrace,
    policy: &dyn JumpPolicy,
) -> Result<(RunMetrics, EventLog)> {
    config.validate()?;
    trace.validate()?;
    let footprint = trace.footprint_pages;
    if footprint > config.total_capacity() {
        return Err(SimError::InvalidConfig(format!(
            "footprint of {footprint} pages exceeds cluster capacity {}",
            config.total_capacity()
        )));
    }
    let mut m = setup(config, footprint)?;
    debug!(
        "{}: setup done at {} ns, residency {:?}",
        trace.workload_id,
        m.metrics().sim_time_ns,
        m.cluster().residency()
    );

    let mut accesses = 0u64;
    for rep in 0..config.repeats {
        let mut sync = if rep == 0 { &trace.sync_points[..] } else { &[] };
        for (i, &v) in trace.accesses.iter().enumerate() {
            while let Some((p, rest)) = sync.split_first() {
                if p.at > i {
                    break;
                }
                m.emit_sync(SyncEvent { kind: p.kind });
                sync = rest;
            }
            if m.lookup(v)? == m.process().exec_node {
                m.local_hit(v)?;
            } else {
                m.pull(v)?;
                if let PolicyDecision::JumpTo(target) = policy.on_remote_fault(&m.process().view()) {
                    m.jump(target)?;
                }
            }
            accesses += 1;
            if config.sample_every.is_some_and(|k| accesses.is_multiple_of(k)) {
                let sample =
                    ResidencySample { time_ns: m.metrics().sim_time_ns, per_node: m.cluster().residency() };
                m.metrics_mut().residency.push(sample);
            }
        }
        for p in sync {
            m.emit_sync(SyncEvent { kind: p.kind });
        }
    }
    m.flush_sync()?;
    if config.strict {
        let cost = m.cost_model().clone();
        m.metrics()
            .check_accounting(&cost)
            .map_err(|e| SimError::Invariant { event: m.event_index(), detail: e })?;
    }
    Ok(m.into_parts())
}

/// Elastic run measured against a baseline of the same workload.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub workload_id: String,
    /// Baseline time over elastic time.
    pub speedup: f64,
    /// Elastic bytes over baseline bytes.
    pub traffic_ratio: f64,
    pub jumps: u64,
    pub jump_frequency: f64,
}

pub fn compare(elastic: &RunOutcome, baseline: &RunOutcome) -> Result<ComparisonReport> {
    if elastic.workload_id != baseline.workload_id {
        return Err(SimError::WorkloadMismatch(elastic.workload_id.clone(), baseline.workload_id.clone()));
    }
    Ok(compare_metrics(&elastic.workload_id, &elastic.metrics, &baseline.metrics))
}

pub(crate) fn compare_metrics(id: &str, elastic: &RunMetrics, baseline: &RunMetrics) -> ComparisonReport {
    let ratio = |a: u64, b: u64| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    ComparisonReport {
        workload_id: id.to_string(),
        speedup: ratio(baseline.sim_time_ns, elastic.sim_time_ns),
        traffic_ratio: ratio(elastic.network_bytes, baseline.network_bytes),
        jumps: elastic.counts.jumps,
        jump_frequency: elastic.jump_frequency(),
    }
}
