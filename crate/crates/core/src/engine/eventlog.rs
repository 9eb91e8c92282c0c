//! Plain-text event log: a `#` header line, then one event per line as
//! `kind key=value ... time_ns=<cumulative> bytes=<cumulative>`.

use std::io::{BufRead, Write};

use crate::error::{Result, SimError};
use crate::model::{Counts, CostModel, LatencyRange, NodeId, Vpn};
use crate::primitives::{Event, EventKind, EventLog};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHeader {
    pub workload: String,
    pub threshold: String,
}

pub fn write_event_log(mut w: impl Write, header: &LogHeader, log: &EventLog) -> std::io::Result<()> {
    writeln!(w, "# workload={} threshold={}", header.workload, header.threshold)?;
    for e in log.events() {
        match e.kind {
            EventKind::LocalHits { count } => write!(w, "local_hits count={count}")?,
            EventKind::Pull { vpn, from } => write!(w, "pull vpn={vpn} from={from}")?,
            EventKind::Push { vpn, to } => write!(w, "push vpn={vpn} to={to}")?,
            EventKind::Jump { from, to } => write!(w, "jump from={from} to={to}")?,
            EventKind::SyncFlush { msgs } => write!(w, "sync_flush msgs={msgs}")?,
            EventKind::Stretch { to } => write!(w, "stretch to={to}")?,
        }
        writeln!(w, " time_ns={} bytes={}", e.cum_time_ns, e.cum_bytes)?;
    }
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> SimError {
    SimError::EventLog(format!("line {line}: {msg}"))
}

pub fn read_event_log(r: impl BufRead) -> Result<(LogHeader, EventLog)> {
    let mut header = None;
    let mut events = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| bad(n, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut h = LogHeader { workload: String::new(), threshold: String::new() };
            for tok in rest.split_whitespace() {
                match tok.split_once('=') {
                    Some(("workload", v)) => h.workload = v.to_string(),
                    Some(("threshold", v)) => h.threshold = v.to_string(),
                    _ => {}
                }
            }
            header.get_or_insert(h);
            continue;
        }
        let mut toks = line.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        let mut fields = Vec::new();
        for tok in toks {
            let (k, v) = tok.split_once('=').ok_or_else(|| bad(n, format!("malformed field {tok:?}")))?;
            let v: u64 = v.parse().map_err(|_| bad(n, format!("bad number in {tok:?}")))?;
            fields.push((k, v));
        }
        let get = |key: &str| {
            fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or_else(|| bad(n, format!("missing {key}")))
        };
        let node = |key: &str| -> Result<NodeId> {
            let v = get(key)?;
            u16::try_from(v).map(NodeId).map_err(|_| bad(n, format!("node id {v} out of range")))
        };
        let vpn = || -> Result<Vpn> {
            let v = get("vpn")?;
            u32::try_from(v).map(Vpn).map_err(|_| bad(n, format!("page {v} out of range")))
        };
        let kind = match kind {
            "local_hits" => EventKind::LocalHits { count: get("count")? },
            "pull" => EventKind::Pull { vpn: vpn()?, from: node("from")? },
            "push" => EventKind::Push { vpn: vpn()?, to: node("to")? },
            "jump" => EventKind::Jump { from: node("from")?, to: node("to")? },
            "sync_flush" => EventKind::SyncFlush { msgs: get("msgs")? },
            "stretch" => EventKind::Stretch { to: node("to")? },
            other => return Err(bad(n, format!("unknown event {other:?}"))),
        };
        events.push(Event { kind, cum_time_ns: get("time_ns")?, cum_bytes: get("bytes")? });
    }
    let header = header.ok_or_else(|| SimError::EventLog("missing header line".into()))?;
    Ok((header, EventLog::from_events(events)))
}

/// Totals recomputed from a log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Replay {
    pub counts: Counts,
    pub sim_time_ns: u64,
    pub network_bytes: u64,
}

/// Re-derives every event's cost from `cost` and checks it against the
/// cumulative values recorded in the log. Byte counts must match exactly;
/// times must match exactly unless jitter is configured, in which case each
/// step must fall inside the jitter range.
pub fn replay(log: &EventLog, cost: &CostModel) -> Result<Replay> {
    let mut r = Replay::default();
    let (mut time, mut bytes) = (0u64, 0u64);
    let fixed = |ns: u64| LatencyRange { min_ns: ns, max_ns: ns };
    for (i, e) in log.events().iter().enumerate() {
        let (lat, k, b) = match e.kind {
            EventKind::LocalHits { count } => {
                r.counts.local_hits += count;
                (fixed(cost.local_access_latency_ns), count, 0)
            }
            EventKind::Pull { .. } => {
                r.counts.pulls += 1;
                r.counts.remote_faults += 1;
                (cost.transfer_jitter.unwrap_or(fixed(cost.pull_latency_ns)), 1, cost.page_bytes)
            }
            EventKind::Push { .. } => {
                r.counts.pushes += 1;
                (cost.transfer_jitter.unwrap_or(fixed(cost.push_latency_ns)), 1, cost.page_bytes)
            }
            EventKind::Jump { .. } => {
                r.counts.jumps += 1;
                (cost.jump_jitter.unwrap_or(fixed(cost.jump_latency_ns)), 1, cost.jump_bytes)
            }
            EventKind::SyncFlush { msgs } => {
                r.counts.sync_msgs += msgs;
                (fixed(cost.sync_msg_latency_ns), msgs, cost.sync_msg_bytes * msgs)
            }
            EventKind::Stretch { .. } => {
                r.counts.stretches += 1;
                (fixed(cost.stretch_latency_ns), 1, cost.stretch_bytes)
            }
        };
        bytes += b;
        if e.cum_bytes != bytes {
            return Err(SimError::EventLog(format!(
                "event {i}: cumulative bytes {} but costs add up to {bytes}",
                e.cum_bytes
            )));
        }
        let step = e.cum_time_ns.checked_sub(time).ok_or_else(|| {
            SimError::EventLog(format!("event {i}: time goes backwards to {}", e.cum_time_ns))
        })?;
        if step < lat.min_ns * k || step > lat.max_ns * k {
            return Err(SimError::EventLog(format!(
                "event {i}: step of {step} ns outside {}..={} ns",
                lat.min_ns * k,
                lat.max_ns * k
            )));
        }
        time = e.cum_time_ns;
    }
    r.sim_time_ns = time;
    r.network_bytes = bytes;
    Ok(r)
}
