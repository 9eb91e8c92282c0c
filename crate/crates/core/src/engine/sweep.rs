//! Threshold and depth sweeps.

use super::{compare_metrics, run, ComparisonReport, Execution, RunConfig};
use crate::error::{Result, SimError};
use crate::model::RunMetrics;
use crate::policy::PolicySpec;
use crate::workloads::{AccessTrace, WorkloadKind, WorkloadParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: PolicySpec,
    pub metrics: RunMetrics,
}

/// One baseline run plus one elastic run per threshold, thresholds ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub workload_id: String,
    pub baseline: RunMetrics,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Fastest elastic row; ties go to the smaller threshold.
    pub fn best(&self) -> &SweepRow {
        let mut best = &self.rows[0];
        for r in &self.rows[1..] {
            if r.metrics.sim_time_ns < best.metrics.sim_time_ns {
                best = r;
            }
        }
        best
    }

    pub fn row(&self, threshold: u64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.policy == PolicySpec::Threshold(threshold))
    }

    pub fn comparison(&self, row: &SweepRow) -> ComparisonReport {
        compare_metrics(&self.workload_id, &row.metrics, &self.baseline)
    }

    pub fn best_comparison(&self) -> ComparisonReport {
        self.comparison(self.best())
    }
}

pub fn sweep_thresholds(config: &RunConfig, trace: &AccessTrace, thresholds: &[u64]) -> Result<SweepReport> {
    sweep_thresholds_with(Execution::default(), config, trace, thresholds)
}

pub fn sweep_thresholds_with(
    exec: Execution,
    config: &RunConfig,
    trace: &AccessTrace,
    thresholds: &[u64],
) -> Result<SweepReport> {
    if thresholds.is_empty() {
        return Err(SimError::InvalidConfig("threshold sweep needs at least one threshold".into()));
    }
    if thresholds[0] == 0 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimError::InvalidConfig(format!(
            "thresholds must be positive and strictly ascending, got {thresholds:?}"
        )));
    }
    let policies: Vec<PolicySpec> = std::iter::once(PolicySpec::Never)
        .chain(thresholds.iter().map(|t| PolicySpec::Threshold(*t)))
        .collect();
    let results = exec.map(&policies, |p| run(&config.with_policy(*p), trace).map(|o| o.metrics));
    let mut results = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter();
    let baseline = results.next().expect("baseline row");
    let rows = policies[1..]
        .iter()
        .zip(results)
        .map(|(policy, metrics)| SweepRow { policy: *policy, metrics })
        .collect();
    Ok(SweepReport { workload_id: trace.workload_id.clone(), baseline, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthRow {
    pub depth: u32,
    pub footprint_pages: usize,
    pub elastic: RunMetrics,
    pub baseline: RunMetrics,
}

/// Regenerates a DFS workload at each depth (all else fixed) and runs it
/// elastic at `threshold` and as baseline.
pub fn depth_sweep(
    exec: Execution,
    config: &RunConfig,
    base: &WorkloadParams,
    depths: &[u32],
    threshold: u64,
) -> Result<Vec<DepthRow>> {
    if base.kind != WorkloadKind::Dfs {
        return Err(SimError::InvalidWorkload(format!("depth sweep needs dfs, got {}", base.kind)));
    }
    if depths.is_empty() {
        return Err(SimError::InvalidConfig("depth sweep needs at least one depth".into()));
    }
    let elastic = config.with_policy(PolicySpec::Threshold(threshold));
    let rows = exec.map(depths, |&depth| -> Result<DepthRow> {
        let params = WorkloadParams { dfs_depth: Some(depth), ..base.clone() };
        let trace = params.generate()?;
        Ok(DepthRow {
            depth,
            footprint_pages: trace.footprint_pages,
            elastic: run(&elastic, &trace)?.metrics,
            baseline: super::run_baseline(config, &trace)?.metrics,
        })
    });
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vpn;

    fn trace() -> AccessTrace {
        let pass: Vec<Vpn> = (0..600).map(Vpn).collect();
        let accesses = [pass.clone(), pass].concat();
        AccessTrace::new(accesses, 600, "two-pass").unwrap()
    }

    fn small() -> RunConfig {
        RunConfig { capacities: vec![400, 400], ..RunConfig::default() }
    }

    #[test]
    fn rejects_bad_threshold_lists() {
        assert!(sweep_thresholds(&small(), &trace(), &[]).is_err());
        assert!(sweep_thresholds(&small(), &trace(), &[64, 32]).is_err());
        assert!(sweep_thresholds(&small(), &trace(), &[32, 32]).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let ts = [1, 4, 32, 1024];
        let a = sweep_thresholds_with(Execution::Sequential, &small(), &trace(), &ts).unwrap();
        let b = sweep_thresholds_with(Execution::Parallel, &small(), &trace(), &ts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
        assert_eq!(a.baseline.counts.jumps, 0);
    }

    #[test]
    fn huge_threshold_matches_baseline() {
        let r = sweep_thresholds(&small(), &trace(), &[1 << 40]).unwrap();
        assert_eq!(r.rows[0].metrics, r.baseline);
        let c = r.best_comparison();
        assert_eq!((c.speedup, c.traffic_ratio), (1.0, 1.0));
    }

    #[test]
    fn depth_sweep_needs_dfs() {
        let p = WorkloadParams::new(WorkloadKind::LinearSearch, 100, 1);
        assert!(depth_sweep(Execution::Sequential, &small(), &p, &[1], 4).is_err());
    }
}
