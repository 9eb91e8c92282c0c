//! metrics.csv, event logs and the text tables printed after each command.
//!
//! metrics.csv has one row per run with the fixed columns
//! `workload, threshold, sim_time_ns, network_bytes, pulls, pushes, jumps,
//! jump_freq`. Threshold is `never` for the baseline. Times and bytes are
//! integers; `jump_freq` is jumps per simulated second with six decimals.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use elastic_sim::engine::{read_event_log, write_event_log, LogHeader};
use elastic_sim::primitives::EventLog;
use elastic_sim::{PolicySpec, RunMetrics};

pub const METRICS_FILE: &str = "metrics.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub workload: String,
    pub threshold: String,
    pub sim_time_ns: u64,
    pub network_bytes: u64,
    pub pulls: u64,
    pub pushes: u64,
    pub jumps: u64,
    pub jump_freq: String,
}

impl MetricsRow {
    pub fn new(workload: &str, policy: PolicySpec, m: &RunMetrics) -> Self {
        Self {
            workload: workload.to_string(),
            threshold: policy.to_string(),
            sim_time_ns: m.sim_time_ns,
            network_bytes: m.network_bytes,
            pulls: m.counts.pulls,
            pushes: m.counts.pushes,
            jumps: m.counts.jumps,
            jump_freq: format!("{:.6}", m.jump_frequency()),
        }
    }

    pub fn is_baseline(&self) -> bool {
        self.threshold == "never"
    }

    pub fn jump_freq(&self) -> f64 {
        self.jump_freq.parse().unwrap_or(0.0)
    }
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = r.deserialize().collect::<Result<Vec<MetricsRow>, _>>();
    rows.with_context(|| format!("reading {}", path.display()))
}

/// Event log file name for a run under `policy`.
pub fn events_file(policy: PolicySpec) -> String {
    match policy {
        PolicySpec::Never => "events-baseline.log".into(),
        _ => "events.log".into(),
    }
}

pub fn write_events(path: &Path, workload: &str, policy: PolicySpec, log: &EventLog) -> Result<()> {
    let header = LogHeader { workload: workload.to_string(), threshold: policy.to_string() };
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_event_log(&mut w, &header, log)?;
    w.flush()?;
    Ok(())
}

pub fn read_events(path: &Path) -> Result<(LogHeader, EventLog)> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_event_log(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

/// All files called `name` below `dir`, in sorted order.
pub fn find_files(dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).with_context(|| format!("listing {}", d.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == name) {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

fn secs(ns: u64) -> String {
    format!("{:.4}", ns as f64 * 1e-9)
}

fn mib(bytes: u64) -> String {
    format!("{:.2}", bytes as f64 / (1024.0 * 1024.0))
}

/// Fixed-width table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Per-run table: time, traffic and event counts, with ratios against the
/// baseline row when there is one.
pub fn runs_table(rows: &[MetricsRow]) -> String {
    let base = rows.iter().find(|r| r.is_baseline());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let (speedup, traffic) = match base {
                Some(b) => (
                    format!("{:.3}", b.sim_time_ns as f64 / r.sim_time_ns.max(1) as f64),
                    format!("{:.3}", r.network_bytes as f64 / b.network_bytes.max(1) as f64),
                ),
                None => ("-".into(), "-".into()),
            };
            vec![
                r.threshold.clone(),
                secs(r.sim_time_ns),
                mib(r.network_bytes),
                r.pulls.to_string(),
                r.pushes.to_string(),
                r.jumps.to_string(),
                format!("{:.1}", r.jump_freq()),
                speedup,
                traffic,
            ]
        })
        .collect();
    table(
        &["threshold", "time_s", "traffic_mib", "pulls", "pushes", "jumps", "jumps/s", "speedup", "traffic"],
        &body,
    )
}

/// One consolidated row per workload: best threshold by time and its
/// comparison against the baseline. Without a baseline the best row is
/// compared with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub workload: String,
    pub best: MetricsRow,
    pub speedup: f64,
    pub traffic_ratio: f64,
}

pub fn consolidate(rows: &[MetricsRow]) -> Vec<ReportRow> {
    let mut workloads: Vec<&str> = rows.iter().map(|r| r.workload.as_str()).collect();
    workloads.sort_unstable();
    workloads.dedup();
    workloads
        .into_iter()
        .filter_map(|w| {
            let mine: Vec<&MetricsRow> = rows.iter().filter(|r| r.workload == w).collect();
            let base = mine.iter().find(|r| r.is_baseline()).copied();
            let elastic = mine.iter().filter(|r| !r.is_baseline());
            // ties go to the row listed first, which is the smaller threshold
            let best = elastic.fold(None::<&MetricsRow>, |acc, r| match acc {
                Some(a) if a.sim_time_ns <= r.sim_time_ns => Some(a),
                _ => Some(r),
            });
            let best = best.or(base)?;
            let reference = base.unwrap_or(best);
            Some(ReportRow {
                workload: w.to_string(),
                best: best.clone(),
                speedup: reference.sim_time_ns as f64 / best.sim_time_ns.max(1) as f64,
                traffic_ratio: best.network_bytes as f64 / reference.network_bytes.max(1) as f64,
            })
        })
        .collect()
}

pub fn report_table(rows: &[ReportRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.workload.clone(),
                r.best.threshold.clone(),
                r.best.jumps.to_string(),
                format!("{:.1}", r.best.jump_freq()),
                format!("{:.3}", r.speedup),
                format!("{:.3}", r.traffic_ratio),
            ]
        })
        .collect();
    table(&["workload", "best_threshold", "jumps", "jumps/s", "speedup", "traffic_ratio"], &body)
}
