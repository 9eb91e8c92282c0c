//! Experiment spec files.
//!
//! A spec is a TOML document. Every key is optional; anything left out
//! takes the desk-scale default. Latencies carry their unit in the key name
//! (`_us` or `_ns`) and are converted to whole nanoseconds.
//!
//! ```toml
//! name = "linear"          # keys the output directory
//! seed = 1                 # workload data and latency jitter
//! strict = false           # audit after every primitive, write events.log
//! events = false           # write events.log without strict audits
//! repeats = 2              # back-to-back replays of the trace
//!
//! [cluster]
//! capacities = [4096, 4096]    # pages per node, node 0 is home
//! high_watermark = 0.95
//! low_watermark = 0.90
//!
//! [cost]
//! stretch_latency_us = 2200
//! stretch_bytes = 9216
//! pull_latency_us = 32.5
//! push_latency_us = 32.5
//! page_bytes = 4096
//! jump_latency_us = 50
//! jump_bytes = 9216
//! local_access_ns = 100
//! sync_msg_latency_us = 5
//! sync_msg_bytes = 256
//! jitter = false               # draw push/pull/jump latencies from the measured ranges
//!
//! [policy]
//! threshold = "32"             # a count (K/M suffixes allowed), "inf" or "never"
//!
//! [workload]
//! kind = "linear-search"       # dfs, dijkstra, block-sort, heap-sort, count-sort
//! elements = 3840000
//! element_bytes = 8
//! # dfs: depth, branching, extra_edges, window
//! # dijkstra: connectivity, band, max_distance
//! # count-sort: key_range
//! # trace = "t.bin"          # replay a binary trace file instead of generating one
//!
//! [sweep]
//! thresholds = ["32", "64", "512", "8192"]
//! depths = [2, 4, 8, 16]
//! depth_threshold = 512
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use elastic_sim::policy::parse_count;
use elastic_sim::{CostModel, PolicySpec, RunConfig, Watermarks, WorkloadKind, WorkloadParams};

pub const DEFAULT_THRESHOLDS: [u64; 4] = [32, 64, 512, 8192];
pub const DEFAULT_DEPTHS: [u32; 4] = [2, 4, 8, 16];
pub const DEFAULT_DEPTH_THRESHOLD: u64 = 512;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub strict: Option<bool>,
    pub events: Option<bool>,
    pub repeats: Option<u32>,
    #[serde(default)]
    pub cluster: ClusterSection,
    #[serde(default)]
    pub cost: CostSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub workload: WorkloadSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSection {
    pub capacities: Option<Vec<usize>>,
    pub high_watermark: Option<f64>,
    pub low_watermark: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    pub stretch_latency_us: Option<f64>,
    pub stretch_bytes: Option<u64>,
    pub pull_latency_us: Option<f64>,
    pub push_latency_us: Option<f64>,
    pub page_bytes: Option<u64>,
    pub jump_latency_us: Option<f64>,
    pub jump_bytes: Option<u64>,
    pub local_access_ns: Option<u64>,
    pub sync_msg_latency_us: Option<f64>,
    pub sync_msg_bytes: Option<u64>,
    pub jitter: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub threshold: Option<Count>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSection {
    pub trace: Option<PathBuf>,
    pub kind: Option<String>,
    pub elements: Option<u64>,
    pub element_bytes: Option<u64>,
    pub depth: Option<u32>,
    pub branching: Option<u32>,
    pub extra_edges: Option<f64>,
    pub window: Option<u64>,
    pub connectivity: Option<f64>,
    pub band: Option<u64>,
    pub max_distance: Option<u64>,
    pub key_range: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub thresholds: Option<Vec<Count>>,
    pub depths: Option<Vec<u32>>,
    pub depth_threshold: Option<Count>,
}

/// A count written either as a TOML integer or as a string such as "4M".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Count {
    Int(u64),
    Text(String),
}

impl Count {
    fn policy(&self) -> Result<PolicySpec> {
        Ok(match self {
            Count::Int(n) => PolicySpec::Threshold(*n),
            Count::Text(s) => PolicySpec::parse(s)?,
        })
    }

    fn value(&self) -> Result<u64> {
        Ok(match self {
            Count::Int(n) => *n,
            Count::Text(s) => parse_count(s)?,
        })
    }
}

/// Everything a command needs, resolved against the defaults.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub config: RunConfig,
    pub workload: WorkloadParams,
    /// Set when the spec injects a trace file; `workload` is then unused.
    pub trace_file: Option<PathBuf>,
    pub thresholds: Vec<u64>,
    pub depths: Vec<u32>,
    pub depth_threshold: u64,
    pub write_events: bool,
}

fn micros(key: &str, us: Option<f64>, default_ns: u64) -> Result<u64> {
    let Some(us) = us else { return Ok(default_ns) };
    let ns = us * 1000.0;
    if !(ns >= 0.0 && ns.fract() == 0.0 && ns < u64::MAX as f64) {
        bail!("{key} = {us} is not a whole number of nanoseconds");
    }
    Ok(ns as u64)
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec = Self::parse(&text).with_context(|| format!("in spec file {}", path.display()))?;
        if let (Some(t), Some(dir)) = (&spec.workload.trace, path.parent()) {
            spec.workload.trace = Some(dir.join(t));
        }
        Ok(spec)
    }

    /// Resolves the spec. `default_name` names the experiment when the file
    /// does not.
    pub fn resolve(&self, default_name: &str) -> Result<Experiment> {
        let seed = self.seed.unwrap_or(1);
        let w = &self.workload;
        if w.trace.is_some() && (w.kind.is_some() || w.elements.is_some()) {
            bail!("[workload] takes either a trace file or generator keys, not both");
        }
        let kind: WorkloadKind = match &w.kind {
            Some(k) => k.parse()?,
            None => WorkloadKind::LinearSearch,
        };
        let mut workload = WorkloadParams::desk_default(kind, seed);
        if let Some(n) = w.elements {
            workload.elements = n;
        }
        if let Some(b) = w.element_bytes {
            workload.element_bytes = b;
        }
        macro_rules! set {
            ($($field:ident = $value:expr),*) => {$(if let Some(v) = $value { workload.$field = Some(v); })*};
        }
        set!(
            dfs_depth = w.depth,
            dfs_branching = w.branching,
            dfs_extra_edges = w.extra_edges,
            dfs_window = w.window,
            connectivity = w.connectivity,
            band = w.band,
            max_distance = w.max_distance,
            key_range = w.key_range
        );

        let d = CostModel::default();
        let c = &self.cost;
        let mut cost = CostModel {
            stretch_latency_ns: micros("stretch_latency_us", c.stretch_latency_us, d.stretch_latency_ns)?,
            stretch_bytes: c.stretch_bytes.unwrap_or(d.stretch_bytes),
            pull_latency_ns: micros("pull_latency_us", c.pull_latency_us, d.pull_latency_ns)?,
            push_latency_ns: micros("push_latency_us", c.push_latency_us, d.push_latency_ns)?,
            page_bytes: c.page_bytes.unwrap_or(d.page_bytes),
            jump_latency_ns: micros("jump_latency_us", c.jump_latency_us, d.jump_latency_ns)?,
            jump_bytes: c.jump_bytes.unwrap_or(d.jump_bytes),
            local_access_latency_ns: c.local_access_ns.unwrap_or(d.local_access_latency_ns),
            sync_msg_latency_ns: micros("sync_msg_latency_us", c.sync_msg_latency_us, d.sync_msg_latency_ns)?,
            sync_msg_bytes: c.sync_msg_bytes.unwrap_or(d.sync_msg_bytes),
            ..d
        };
        if c.jitter == Some(true) {
            cost = cost.with_measured_ranges();
        }

        let policy = match &self.policy.threshold {
            Some(t) => t.policy()?,
            None => PolicySpec::Threshold(DEFAULT_THRESHOLDS[0]),
        };
        let desk = RunConfig::desk(policy);
        let watermarks = Watermarks {
            high: self.cluster.high_watermark.unwrap_or(desk.watermarks.high),
            low: self.cluster.low_watermark.unwrap_or(desk.watermarks.low),
        };
        let strict = self.strict.unwrap_or(false);
        let config = RunConfig {
            capacities: self.cluster.capacities.clone().unwrap_or(desk.capacities.clone()),
            watermarks,
            cost,
            seed,
            strict,
            record_events: strict || self.events.unwrap_or(false),
            repeats: self.repeats.unwrap_or(if w.trace.is_some() { 1 } else { kind.desk_repeats() }),
            ..desk
        };
        config.validate()?;

        let thresholds = match &self.sweep.thresholds {
            Some(list) => list.iter().map(Count::value).collect::<Result<Vec<_>>>()?,
            None => DEFAULT_THRESHOLDS.to_vec(),
        };
        let depth_threshold = match &self.sweep.depth_threshold {
            Some(t) => t.value()?,
            None => DEFAULT_DEPTH_THRESHOLD,
        };
        Ok(Experiment {
            name: self.name.clone().unwrap_or_else(|| default_name.to_string()),
            write_events: config.record_events,
            config,
            workload,
            trace_file: w.trace.clone(),
            thresholds,
            depths: self.sweep.depths.clone().unwrap_or(DEFAULT_DEPTHS.to_vec()),
            depth_threshold,
        })
    }
}

impl Experiment {
    /// Applies the command-line overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, strict: bool) -> Self {
        if let Some(s) = seed {
            self.config.seed = s;
            self.workload.seed = s;
        }
        if strict {
            self.config.strict = true;
            self.config.record_events = true;
            self.write_events = true;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_the_desk_default() {
        let e = SpecFile::parse("").unwrap().resolve("x").unwrap();
        assert_eq!(e.name, "x");
        assert_eq!(e.config.capacities, vec![4096, 4096]);
        assert_eq!(e.config.cost, CostModel::default());
        assert_eq!(e.workload, WorkloadParams::desk_default(WorkloadKind::LinearSearch, 1));
        assert_eq!(e.config.repeats, 2);
        assert_eq!(e.thresholds, DEFAULT_THRESHOLDS);
    }

    #[test]
    fn units_convert_to_nanoseconds() {
        let text = "[cost]\npull_latency_us = 32.5\njump_latency_us = 45\nlocal_access_ns = 7\n";
        let e = SpecFile::parse(text).unwrap().resolve("x").unwrap();
        assert_eq!(e.config.cost.pull_latency_ns, 32_500);
        assert_eq!(e.config.cost.jump_latency_ns, 45_000);
        assert_eq!(e.config.cost.local_access_latency_ns, 7);
        let bad = SpecFile::parse("[cost]\npull_latency_us = 0.0001\n").unwrap().resolve("x");
        assert!(bad.is_err());
    }

    #[test]
    fn thresholds_accept_suffixes() {
        let text = "[policy]\nthreshold = \"never\"\n[sweep]\nthresholds = [32, \"4M\"]\ndepth_threshold = \"1K\"\n";
        let e = SpecFile::parse(text).unwrap().resolve("x").unwrap();
        assert_eq!(e.config.policy, PolicySpec::Never);
        assert_eq!(e.thresholds, vec![32, 4 << 20]);
        assert_eq!(e.depth_threshold, 1024);
    }

    #[test]
    fn workload_keys_override_defaults() {
        let text = "[workload]\nkind = \"dfs\"\nelements = 5000\ndepth = 3\nwindow = 1\n";
        let e = SpecFile::parse(text).unwrap().resolve("x").unwrap();
        assert_eq!(e.workload.kind, WorkloadKind::Dfs);
        assert_eq!(e.workload.elements, 5000);
        assert_eq!(e.workload.dfs_depth, Some(3));
        assert_eq!(e.workload.dfs_window, Some(1));
    }

    #[test]
    fn unknown_keys_are_reported_with_their_line() {
        let err = SpecFile::parse("name = \"a\"\n\n[cluster]\ncapacity = 3\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("capacity"), "{msg}");
    }

    #[test]
    fn overrides_apply() {
        let e = SpecFile::parse("").unwrap().resolve("x").unwrap().with_overrides(Some(9), true);
        assert_eq!((e.config.seed, e.workload.seed), (9, 9));
        assert!(e.config.strict && e.write_events);
    }
}
