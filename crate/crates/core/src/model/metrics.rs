use super::cost::CostModel;
use super::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counts {
    pub stretches: u64,
    pub pushes: u64,
    pub pulls: u64,
    pub jumps: u64,
    pub local_hits: u64,
    pub remote_faults: u64,
    pub sync_msgs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JumpRecord {
    /// Simulated time at which the jump completed.
    pub time_ns: u64,
    pub from: NodeId,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidencySample {
    pub time_ns: u64,
    pub per_node: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunMetrics {
    pub sim_time_ns: u64,
    pub network_bytes: u64,
    pub counts: Counts,
    pub jump_log: Vec<JumpRecord>,
    pub residency: Vec<ResidencySample>,
}

impl RunMetrics {
    /// Network bytes implied by the event counts.
    pub fn expected_network_bytes(&self, cost: &CostModel) -> u64 {
        let c = &self.counts;
        cost.stretch_bytes * c.stretches
            + cost.page_bytes * (c.pushes + c.pulls)
            + cost.jump_bytes * c.jumps
            + cost.sync_msg_bytes * c.sync_msgs
    }

    /// Checks the byte accounting identity and `remote_faults == pulls`.
    pub fn check_accounting(&self, cost: &CostModel) -> Result<(), String> {
        let expected = self.expected_network_bytes(cost);
        if expected != self.network_bytes {
            return Err(format!(
                "network bytes {} differ from accounted {}",
                self.network_bytes, expected
            ));
        }
        if self.counts.remote_faults != self.counts.pulls {
            return Err(format!(
                "remote faults {} differ from pulls {}",
                self.counts.remote_faults, self.counts.pulls
            ));
        }
        if self.counts.jumps as usize != self.jump_log.len() {
            return Err("jump log length differs from jump count".into());
        }
        Ok(())
    }

    /// Jumps per simulated second.
    pub fn jump_frequency(&self) -> f64 {
        if self.sim_time_ns == 0 {
            return 0.0;
        }
        self.counts.jumps as f64 / (self.sim_time_ns as f64 * 1e-9)
    }

    /// Simulated time from the last jump to the end of the run (the whole
    /// run if nothing jumped).
    pub fn jump_free_suffix_ns(&self) -> u64 {
        let last = self.jump_log.last().map_or(0, |j| j.time_ns);
        self.sim_time_ns - last
    }

    /// Longest stretch of simulated time spent on one node without jumping.
    pub fn longest_stay_ns(&self) -> u64 {
        let mut prev = 0;
        let mut best = 0;
        for j in &self.jump_log {
            best = best.max(j.time_ns - prev);
            prev = j.time_ns;
        }
        best.max(self.sim_time_ns - prev)
    }
}
