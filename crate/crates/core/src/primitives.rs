//! The four scaling primitives (stretch, push, pull, jump), initial
//! balancing and state-synchronization accounting.
//!
//! Each primitive is a transaction over a [`Machine`]: it mutates placement
//! or the execution locus, debits the cost model into the run metrics and
//! appends to the event log. In strict mode every transaction is followed by
//! a full audit.

use log::warn;

use crate::error::{Result, SimError};
use crate::model::{Cluster, CostModel, CostSampler, JumpRecord, NodeId, RunMetrics, Vpn};
use crate::policy::StateView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyncKind {
    MapRegion,
    UnmapRegion,
    OpenFile,
    CloseFile,
}

impl SyncKind {
    pub fn name(self) -> &'static str {
        match self {
            SyncKind::MapRegion => "map_region",
            SyncKind::UnmapRegion => "unmap_region",
            SyncKind::OpenFile => "open_file",
            SyncKind::CloseFile => "close_file",
        }
    }
}

/// A state change that must reach every spanned node before the next jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncEvent {
    pub kind: SyncKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// A run of consecutive local hits.
    LocalHits { count: u64 },
    Pull { vpn: Vpn, from: NodeId },
    Push { vpn: Vpn, to: NodeId },
    Jump { from: NodeId, to: NodeId },
    SyncFlush { msgs: u64 },
    Stretch { to: NodeId },
}

/// An event with the cumulative simulated time and network bytes after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    pub cum_time_ns: u64,
    pub cum_bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    enabled: bool,
    events: Vec<Event>,
}

impl EventLog {
    pub fn new(enabled: bool) -> Self {
        Self { enabled, events: Vec::new() }
    }

    pub fn from_events(events: Vec<Event>) -> Self {
        Self { enabled: true, events }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn record(&mut self, kind: EventKind, m: &RunMetrics) {
        if !self.enabled {
            return;
        }
        if let EventKind::LocalHits { count } = kind {
            if let Some(Event { kind: EventKind::LocalHits { count: run }, cum_time_ns, cum_bytes }) =
                self.events.last_mut()
            {
                *run += count;
                *cum_time_ns = m.sim_time_ns;
                *cum_bytes = m.network_bytes;
                return;
            }
        }
        self.events.push(Event { kind, cum_time_ns: m.sim_time_ns, cum_bytes: m.network_bytes });
    }
}

/// Per-process execution state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessContext {
    pub footprint_pages: usize,
    pub home_node: NodeId,
    /// Nodes stretched to, ascending.
    pub span: Vec<NodeId>,
    pub exec_node: NodeId,
    pub remote_fault_counter: u64,
    pub pending_sync_msgs: u64,
    /// Pulls since the last jump, per source node.
    pub fault_tally: Vec<u64>,
    pub jumps_taken: u64,
}

impl ProcessContext {
    pub fn new(footprint_pages: usize, home_node: NodeId, nodes: usize) -> Self {
        Self {
            footprint_pages,
            home_node,
            span: Vec::new(),
            exec_node: home_node,
            remote_fault_counter: 0,
            pending_sync_msgs: 0,
            fault_tally: vec![0; nodes],
            jumps_taken: 0,
        }
    }

    /// Home plus every spanned node.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::once(self.home_node).chain(self.span.iter().copied())
    }

    pub fn is_member(&self, n: NodeId) -> bool {
        n == self.home_node || self.span.binary_search(&n).is_ok()
    }

    pub fn view(&self) -> StateView<'_> {
        StateView {
            exec_node: self.exec_node,
            home_node: self.home_node,
            remote_fault_counter: self.remote_fault_counter,
            fault_tally: &self.fault_tally,
            span: &self.span,
            jumps_taken: self.jumps_taken,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceOutcome {
    pub moved: usize,
    /// Pages requested but not moved because the target filled up.
    pub shortfall: usize,
}

/// Cluster state, process context, metrics and event log of one run.
#[derive(Debug, Clone)]
pub struct Machine {
    cluster: Cluster,
    proc: ProcessContext,
    metrics: RunMetrics,
    log: EventLog,
    costs: CostSampler,
    strict: bool,
    event_index: u64,
}

impl Machine {
    pub fn new(cluster: Cluster, home: NodeId, costs: CostSampler, strict: bool, record: bool) -> Self {
        let proc = ProcessContext::new(cluster.footprint(), home, cluster.node_count());
        Self {
            cluster,
            proc,
            metrics: RunMetrics::default(),
            log: EventLog::new(record),
            costs,
            strict,
            event_index: 0,
        }
    }

    pub fn cluster(&self) -> &Cluster {
        &self.cluster
    }

    pub fn process(&self) -> &ProcessContext {
        &self.proc
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn cost_model(&self) -> &CostModel {
        self.costs.model()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Number of primitive events executed so far (each local hit counts).
    pub fn event_index(&self) -> u64 {
        self.event_index
    }

    pub fn into_parts(self) -> (RunMetrics, EventLog) {
        (self.metrics, self.log)
    }

    pub(crate) fn set_strict(&mut self, strict: bool) {
        self.strict = strict;
    }

    pub(crate) fn metrics_mut(&mut self) -> &mut RunMetrics {
        &mut self.metrics
    }

    fn debit(&mut self, time_ns: u64, bytes: u64) {
        self.metrics.sim_time_ns += time_ns;
        self.metrics.network_bytes += bytes;
    }

    fn emit(&mut self, kind: EventKind) {
        self.event_index += 1;
        self.log.record(kind, &self.metrics);
    }

    fn violation(&self, detail: impl Into<String>) -> SimError {
        SimError::Invariant { event: self.event_index, detail: detail.into() }
    }

    /// Strict-mode audit after a completed primitive.
    fn audit(&self) -> Result<()> {
        if !self.strict {
            return Ok(());
        }
        self.cluster.audit().map_err(|e| self.violation(e))?;
        self.metrics.check_accounting(self.costs.model()).map_err(|e| self.violation(e))?;
        if !self.proc.is_member(self.proc.exec_node) {
            return Err(self.violation("execution locus outside the span"));
        }
        Ok(())
    }

    pub fn lookup(&self, v: Vpn) -> Result<NodeId> {
        self.cluster.lookup(v)
    }

    /// Extends the process to `target`. Stretching to an already-spanned
    /// node is a no-op and returns false.
    pub fn stretch(&mut self, target: NodeId) -> Result<bool> {
        self.cluster.node(target)?;
        if target == self.proc.home_node {
            return Err(SimError::Precondition(format!("cannot stretch to the home node {target}")));
        }
        if let Err(pos) = self.proc.span.binary_search(&target) {
            self.proc.span.insert(pos, target);
        } else {
            warn!("process already stretched to node {target}");
            return Ok(false);
        }
        let cost = self.costs.model();
        let (t, b) = (cost.stretch_latency_ns, cost.stretch_bytes);
        self.debit(t, b);
        self.metrics.counts.stretches += 1;
        self.emit(EventKind::Stretch { to: target });
        self.audit()?;
        Ok(true)
    }

    /// Pushes `count` second-chance victims from the executing node to
    /// `target`, stopping early if `target` fills up.
    pub fn balance(&mut self, target: NodeId, count: usize) -> Result<BalanceOutcome> {
        if self.proc.span.binary_search(&target).is_err() {
            return Err(SimError::Precondition(format!("balance target {target} is not spanned")));
        }
        let exec = self.proc.exec_node;
        let resident = self.cluster.node(exec)?.residency();
        if count > resident {
            return Err(SimError::Precondition(format!(
                "cannot balance {count} pages away from node {exec} holding {resident}"
            )));
        }
        let mut moved = 0;
        while moved < count && self.cluster.node(target)?.free() > 0 {
            let victim = self.cluster.node_mut(exec)?.select_victim()?;
            self.land_push(victim, target, true)?;
            moved += 1;
        }
        Ok(BalanceOutcome { moved, shortfall: count - moved })
    }

    /// Moves a resident page to `target`, which must have room.
    pub fn push(&mut self, v: Vpn, target: NodeId) -> Result<()> {
        let src = self.cluster.lookup(v)?;
        if !self.proc.is_member(target) {
            return Err(SimError::Precondition(format!("push target {target} is not spanned")));
        }
        if src == target {
            return Err(SimError::Precondition(format!("page {v} already on node {target}")));
        }
        if self.cluster.node(target)?.free() == 0 {
            return Err(SimError::OverCapacity(target));
        }
        self.cluster.detach(v)?;
        self.land_push(v, target, true)
    }

    /// Completes a push of a page already unlinked from its source queue.
    /// Evictions inside a pull skip the audit: the pulled page is still in
    /// flight until the pull finishes.
    fn land_push(&mut self, v: Vpn, target: NodeId, audit: bool) -> Result<()> {
        let exec = self.proc.exec_node;
        self.cluster.land(v, target)?;
        let lat = self.costs.push_latency();
        let bytes = self.costs.model().page_bytes;
        self.debit(lat, bytes);
        self.metrics.counts.pushes += 1;
        self.emit(EventKind::Push { vpn: v, to: target });
        if self.strict && self.proc.exec_node != exec {
            return Err(self.violation("push changed the execution locus"));
        }
        if audit {
            self.audit()?;
        }
        Ok(())
    }

    /// Services a remote fault on `v`. If the executing node is at its high
    /// watermark, victims are first pushed out until it is at the low
    /// watermark (or no other node has room); then the page moves in.
    pub fn pull(&mut self, v: Vpn) -> Result<()> {
        let exec = self.proc.exec_node;
        let src = self.cluster.lookup(v)?;
        if src == exec {
            return Err(self.violation(format!("pull of page {v} already local on node {exec}")));
        }
        // Unlink first: the slot it frees on the source node is available
        // to the evictions below, which matters when the cluster is full.
        self.cluster.detach(v)?;
        let node = self.cluster.node(exec)?;
        if node.at_high_watermark() {
            let low = node.low_pages();
            while self.cluster.node(exec)?.residency() > low {
                let Some(dest) = self.cluster.roomiest(self.proc.members().filter(|n| *n != exec))
                else {
                    break;
                };
                let victim = self.cluster.node_mut(exec)?.select_victim()?;
                self.land_push(victim, dest, false)?;
            }
        }
        self.cluster.land(v, exec)?;
        let lat = self.costs.pull_latency();
        let bytes = self.costs.model().page_bytes;
        self.debit(lat, bytes);
        self.metrics.counts.pulls += 1;
        self.metrics.counts.remote_faults += 1;
        self.proc.remote_fault_counter += 1;
        self.proc.fault_tally[src.index()] += 1;
        self.emit(EventKind::Pull { vpn: v, from: src });
        if self.strict && self.proc.exec_node != exec {
            return Err(self.violation("pull changed the execution locus"));
        }
        self.audit()
    }

    /// Transfers execution to `target`. Pending sync messages are flushed
    /// first; the flush is always recorded, even when nothing is pending.
    pub fn jump(&mut self, target: NodeId) -> Result<()> {
        let from = self.proc.exec_node;
        if target == from {
            return Err(SimError::Precondition(format!("jump to current node {target}")));
        }
        if !self.proc.is_member(target) {
            return Err(SimError::Precondition(format!("jump target {target} is not spanned")));
        }
        let snapshot = self.strict.then(|| self.cluster.page_table().clone());
        self.flush_pending(true)?;
        self.proc.exec_node = target;
        self.proc.remote_fault_counter = 0;
        self.proc.fault_tally.iter_mut().for_each(|c| *c = 0);
        self.proc.jumps_taken += 1;
        let lat = self.costs.jump_latency();
        let bytes = self.costs.model().jump_bytes;
        self.debit(lat, bytes);
        self.metrics.counts.jumps += 1;
        let time_ns = self.metrics.sim_time_ns;
        self.metrics.jump_log.push(JumpRecord { time_ns, from, to: target });
        self.emit(EventKind::Jump { from, to: target });
        if let Some(before) = snapshot {
            if &before != self.cluster.page_table() {
                return Err(self.violation("jump moved pages"));
            }
            if self.proc.pending_sync_msgs != 0 || self.proc.remote_fault_counter != 0 {
                return Err(self.violation("counters not reset by jump"));
            }
        }
        self.audit()
    }

    /// Queues one message per spanned node.
    pub fn emit_sync(&mut self, _event: SyncEvent) {
        self.proc.pending_sync_msgs += self.proc.span.len() as u64;
    }

    /// Sends every pending sync message. A no-op when nothing is pending.
    pub fn flush_sync(&mut self) -> Result<()> {
        self.flush_pending(false)
    }

    fn flush_pending(&mut self, always_record: bool) -> Result<()> {
        let n = self.proc.pending_sync_msgs;
        if n == 0 && !always_record {
            return Ok(());
        }
        let cost = self.costs.model();
        let (t, b) = (n * cost.sync_msg_latency_ns, n * cost.sync_msg_bytes);
        self.debit(t, b);
        self.metrics.counts.sync_msgs += n;
        self.proc.pending_sync_msgs = 0;
        self.emit(EventKind::SyncFlush { msgs: n });
        self.audit()
    }

    /// An access to a page resident on the executing node.
    #[inline]
    pub fn local_hit(&mut self, v: Vpn) -> Result<()> {
        let exec = self.proc.exec_node;
        self.cluster.touch(exec, v).map_err(|e| self.violation(e.to_string()))?;
        let t = self.costs.model().local_access_latency_ns;
        self.debit(t, 0);
        self.metrics.counts.local_hits += 1;
        self.emit(EventKind::LocalHits { count: 1 });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Watermarks;

    const PAGE: u64 = 4096;

    fn machine(caps: &[usize], placement: &[u16]) -> Machine {
        let placement: Vec<NodeId> = placement.iter().map(|&n| NodeId(n)).collect();
        let cluster = Cluster::with_placement(caps, Watermarks::default(), &placement).unwrap();
        Machine::new(cluster, NodeId(0), CostSampler::new(CostModel::default(), 0), true, true)
    }

    fn stretched(caps: &[usize], placement: &[u16]) -> Machine {
        let mut m = machine(caps, placement);
        for i in 1..caps.len() {
            m.stretch(NodeId(i as u16)).unwrap();
        }
        m
    }

    #[test]
    fn first_stretch_costs() {
        let mut m = machine(&[4, 4], &[0, 0]);
        assert!(m.stretch(NodeId(1)).unwrap());
        assert_eq!(m.metrics().sim_time_ns, 2_200_000);
        assert_eq!(m.metrics().network_bytes, 9 * 1024);
        assert_eq!(m.process().span, vec![NodeId(1)]);
    }

    #[test]
    fn second_stretch_is_a_no_op() {
        let mut m = machine(&[4, 4], &[0, 0]);
        m.stretch(NodeId(1)).unwrap();
        let before = m.metrics().clone();
        assert!(!m.stretch(NodeId(1)).unwrap());
        assert_eq!(m.metrics(), &before);
    }

    #[test]
    fn stretch_to_third_node() {
        let mut m = machine(&[4, 4, 4], &[0, 0]);
        m.stretch(NodeId(1)).unwrap();
        m.stretch(NodeId(2)).unwrap();
        assert_eq!(m.process().span, vec![NodeId(1), NodeId(2)]);
        assert_eq!(m.process().exec_node, NodeId(0));
        assert!(m.stretch(NodeId(0)).is_err());
        assert!(m.stretch(NodeId(3)).is_err());
    }

    #[test]
    fn one_push_costs_a_page() {
        let mut m = stretched(&[4, 4], &[0, 0]);
        let t0 = m.metrics().sim_time_ns;
        let b0 = m.metrics().network_bytes;
        m.push(Vpn(1), NodeId(1)).unwrap();
        assert_eq!(m.metrics().sim_time_ns - t0, 32_500);
        assert_eq!(m.metrics().network_bytes - b0, PAGE);
        assert_eq!(m.lookup(Vpn(1)), Ok(NodeId(1)));
    }

    #[test]
    fn push_then_pull_round_trip() {
        let mut m = stretched(&[4, 4], &[0, 0, 1]);
        let before = m.cluster().page_table().clone();
        m.push(Vpn(0), NodeId(1)).unwrap();
        m.pull(Vpn(0)).unwrap();
        assert_eq!(m.cluster().page_table(), &before);
        assert_eq!(m.metrics().counts.pushes, 1);
        assert_eq!(m.metrics().counts.pulls, 1);
    }

    #[test]
    fn pushing_only_page_empties_node() {
        let mut m = stretched(&[4, 4], &[0, 1]);
        m.push(Vpn(1), NodeId(0)).unwrap();
        assert_eq!(m.cluster().node(NodeId(1)).unwrap().residency(), 0);
        m.cluster().audit().unwrap();
    }

    #[test]
    fn push_into_full_node_is_refused() {
        let mut m = stretched(&[2, 1], &[0, 1]);
        assert_eq!(m.push(Vpn(0), NodeId(1)), Err(SimError::OverCapacity(NodeId(1))));
    }

    #[test]
    fn one_pull_without_eviction() {
        let mut m = stretched(&[4, 4], &[0, 1]);
        let t0 = m.metrics().sim_time_ns;
        m.pull(Vpn(1)).unwrap();
        assert_eq!(m.metrics().sim_time_ns - t0, 32_500);
        assert_eq!(m.metrics().counts.pulls, 1);
        assert_eq!(m.process().remote_fault_counter, 1);
        assert_eq!(m.process().fault_tally, vec![0, 1]);
        assert_eq!(m.metrics().counts.pushes, 0);
    }

    #[test]
    fn pull_of_local_page_is_a_violation() {
        let mut m = stretched(&[4, 4], &[0, 1]);
        assert!(matches!(m.pull(Vpn(0)), Err(SimError::Invariant { .. })));
    }

    #[test]
    fn pull_into_full_node_evicts_to_low_watermark() {
        // cap 8: high = 8, low = 7. Node 0 full with pages 0..8, page 8 on node 1.
        let mut placement = vec![0u16; 8];
        placement.push(1);
        let mut m = stretched(&[8, 8], &placement);
        m.pull(Vpn(8)).unwrap();
        let n0 = m.cluster().node(NodeId(0)).unwrap();
        // 8 -> evict one (to 7) -> admit -> 8
        assert_eq!(n0.residency(), 8);
        assert_eq!(m.metrics().counts.pushes, 1);
        assert_eq!(m.lookup(Vpn(0)), Ok(NodeId(1)));
        assert_eq!(m.lookup(Vpn(8)), Ok(NodeId(0)));
        m.cluster().audit().unwrap();
    }

    #[test]
    fn pull_in_full_cluster_uses_the_freed_slot() {
        let mut m = stretched(&[2, 2], &[0, 0, 1, 1]);
        m.pull(Vpn(2)).unwrap();
        assert_eq!(m.lookup(Vpn(0)), Ok(NodeId(1)));
        assert_eq!(m.metrics().counts.pushes, 1);
        m.cluster().audit().unwrap();
    }

    #[test]
    fn jump_costs_and_resets() {
        let mut m = stretched(&[4, 4], &[0, 1, 1]);
        m.pull(Vpn(1)).unwrap();
        let t0 = m.metrics().sim_time_ns;
        let b0 = m.metrics().network_bytes;
        m.jump(NodeId(1)).unwrap();
        assert_eq!(m.metrics().sim_time_ns - t0, 50_000);
        assert_eq!(m.metrics().network_bytes - b0, 9 * 1024);
        assert_eq!(m.process().remote_fault_counter, 0);
        assert_eq!(m.process().fault_tally, vec![0, 0]);
        assert_eq!(m.process().exec_node, NodeId(1));
        assert_eq!(m.metrics().jump_log.len(), 1);
    }

    #[test]
    fn jump_to_current_node_is_rejected() {
        let mut m = stretched(&[4, 4], &[0, 1]);
        assert!(m.jump(NodeId(0)).is_err());
        assert!(machine(&[4, 4], &[0]).jump(NodeId(1)).is_err());
    }

    #[test]
    fn pending_sync_is_flushed_before_jump() {
        let mut m = machine(&[4, 4, 4, 4], &[0, 1]);
        m.stretch(NodeId(1)).unwrap();
        m.stretch(NodeId(2)).unwrap();
        m.stretch(NodeId(3)).unwrap();
        m.emit_sync(SyncEvent { kind: SyncKind::MapRegion });
        assert_eq!(m.process().pending_sync_msgs, 3);
        m.jump(NodeId(1)).unwrap();
        let kinds: Vec<_> = m.log().events().iter().map(|e| e.kind).collect();
        let n = kinds.len();
        assert_eq!(kinds[n - 2], EventKind::SyncFlush { msgs: 3 });
        assert_eq!(kinds[n - 1], EventKind::Jump { from: NodeId(0), to: NodeId(1) });
        assert_eq!(m.metrics().counts.sync_msgs, 3);
        assert_eq!(m.process().pending_sync_msgs, 0);
    }

    #[test]
    fn sync_emission_counts_span_members() {
        let mut m = machine(&[4, 4], &[0]);
        m.emit_sync(SyncEvent { kind: SyncKind::OpenFile });
        assert_eq!(m.process().pending_sync_msgs, 0);
        m.stretch(NodeId(1)).unwrap();
        m.emit_sync(SyncEvent { kind: SyncKind::MapRegion });
        assert_eq!(m.process().pending_sync_msgs, 1);
    }

    #[test]
    fn flush_costs() {
        let mut m = stretched(&[4, 4], &[0]);
        let before = m.metrics().clone();
        m.flush_sync().unwrap();
        assert_eq!(m.metrics(), &before);
        m.emit_sync(SyncEvent { kind: SyncKind::MapRegion });
        m.emit_sync(SyncEvent { kind: SyncKind::MapRegion });
        m.flush_sync().unwrap();
        assert_eq!(m.metrics().sim_time_ns - before.sim_time_ns, 2 * 5_000);
        assert_eq!(m.metrics().network_bytes - before.network_bytes, 2 * 256);
    }

    #[test]
    fn ping_pong_jump_bytes() {
        let mut m = stretched(&[4, 4], &[0, 1]);
        let b0 = m.metrics().network_bytes;
        for k in 0..6 {
            m.jump(NodeId(if k % 2 == 0 { 1 } else { 0 })).unwrap();
        }
        assert_eq!(m.metrics().network_bytes - b0, 6 * 9 * 1024);
    }

    #[test]
    fn balance_half_of_resident_pages() {
        let placement = vec![0u16; 1000];
        let mut m = stretched(&[1000, 1000], &placement);
        let b0 = m.metrics().network_bytes;
        let out = m.balance(NodeId(1), 500).unwrap();
        assert_eq!(out, BalanceOutcome { moved: 500, shortfall: 0 });
        assert_eq!(m.metrics().counts.pushes, 500);
        assert_eq!(m.metrics().network_bytes - b0, 500 * PAGE);
    }

    #[test]
    fn balance_zero_is_identity() {
        let mut m = stretched(&[4, 4], &[0, 0]);
        let before = m.metrics().clone();
        let table = m.cluster().page_table().clone();
        assert_eq!(m.balance(NodeId(1), 0).unwrap().moved, 0);
        assert_eq!(m.metrics(), &before);
        assert_eq!(m.cluster().page_table(), &table);
    }

    #[test]
    fn balance_eight_pages_four_away() {
        // Queue on node 0 is [7..0] front to rear, all cold: victims 0,1,2,3.
        let mut m = stretched(&[8, 8], &[0; 8]);
        m.balance(NodeId(1), 4).unwrap();
        assert_eq!(m.cluster().residency(), vec![4, 4]);
        for v in 0..4 {
            assert_eq!(m.lookup(Vpn(v)), Ok(NodeId(1)));
        }
        for v in 4..8 {
            assert_eq!(m.lookup(Vpn(v)), Ok(NodeId(0)));
        }
    }

    #[test]
    fn balance_reports_shortfall() {
        let mut m = stretched(&[8, 3], &[0; 8]);
        let out = m.balance(NodeId(1), 5).unwrap();
        assert_eq!(out, BalanceOutcome { moved: 3, shortfall: 2 });
        assert!(m.balance(NodeId(0), 1).is_err());
    }
}
