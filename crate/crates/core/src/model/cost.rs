use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};

pub const PAGE_SIZE: u64 = 4096;
pub const KB: u64 = 1024;

/// Inclusive latency range in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyRange {
    pub min_ns: u64,
    pub max_ns: u64,
}

/// Latency and transfer size of every primitive. Latencies are integer
/// nanoseconds, sizes integer bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub stretch_latency_ns: u64,
    pub stretch_bytes: u64,
    pub pull_latency_ns: u64,
    pub push_latency_ns: u64,
    pub page_bytes: u64,
    pub jump_latency_ns: u64,
    pub jump_bytes: u64,
    pub local_access_latency_ns: u64,
    pub sync_msg_latency_ns: u64,
    pub sync_msg_bytes: u64,
    /// When set, push/pull latencies are drawn uniformly from this range
    /// instead of using the fixed values.
    pub transfer_jitter: Option<LatencyRange>,
    /// Same for jumps.
    pub jump_jitter: Option<LatencyRange>,
}

impl Default for CostModel {
    /// Measured midpoints: stretch 2.2 ms / 9 KB, push and pull 32.5 us /
    /// 4 KB, jump 50 us / 9 KB.
    fn default() -> Self {
        Self {
            stretch_latency_ns: 2_200_000,
            stretch_bytes: 9 * KB,
            pull_latency_ns: 32_500,
            push_latency_ns: 32_500,
            page_bytes: PAGE_SIZE,
            jump_latency_ns: 50_000,
            jump_bytes: 9 * KB,
            local_access_latency_ns: 100,
            sync_msg_latency_ns: 5_000,
            sync_msg_bytes: 256,
            transfer_jitter: None,
            jump_jitter: None,
        }
    }
}

impl CostModel {
    /// The measured ranges (push/pull 30-35 us, jump 45-55 us) as jitter.
    pub fn with_measured_ranges(mut self) -> Self {
        self.transfer_jitter = Some(LatencyRange { min_ns: 30_000, max_ns: 35_000 });
        self.jump_jitter = Some(LatencyRange { min_ns: 45_000, max_ns: 55_000 });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("stretch_latency", self.stretch_latency_ns),
            ("stretch_bytes", self.stretch_bytes),
            ("pull_latency", self.pull_latency_ns),
            ("push_latency", self.push_latency_ns),
            ("page_bytes", self.page_bytes),
            ("jump_latency", self.jump_latency_ns),
            ("jump_bytes", self.jump_bytes),
            ("local_access_latency", self.local_access_latency_ns),
            ("sync_msg_latency", self.sync_msg_latency_ns),
            ("sync_msg_bytes", self.sync_msg_bytes),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| *v == 0) {
            return Err(SimError::InvalidConfig(format!("cost {name} must be positive")));
        }
        for range in [self.transfer_jitter, self.jump_jitter].into_iter().flatten() {
            if range.min_ns == 0 || range.min_ns > range.max_ns {
                return Err(SimError::InvalidConfig(format!(
                    "latency range {}..={} ns is empty or starts at zero",
                    range.min_ns, range.max_ns
                )));
            }
        }
        Ok(())
    }

    /// A jump pays off once it avoids at least this many pulls.
    pub fn jump_break_even_pulls(&self) -> u64 {
        self.jump_latency_ns / self.pull_latency_ns + 1
    }
}

/// Hands out per-event latencies, drawing from the jitter ranges with a
/// seeded generator when they are configured.
#[derive(Debug, Clone)]
pub struct CostSampler {
    model: CostModel,
    rng: Option<ChaCha8Rng>,
}

impl CostSampler {
    pub fn new(model: CostModel, seed: u64) -> Self {
        let jitter = model.transfer_jitter.is_some() || model.jump_jitter.is_some();
        Self { model, rng: jitter.then(|| ChaCha8Rng::seed_from_u64(seed)) }
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    fn draw(&mut self, fixed: u64, range: Option<LatencyRange>) -> u64 {
        match (range, self.rng.as_mut()) {
            (Some(r), Some(rng)) => rng.gen_range(r.min_ns..=r.max_ns),
            _ => fixed,
        }
    }

    pub fn pull_latency(&mut self) -> u64 {
        self.draw(self.model.pull_latency_ns, self.model.transfer_jitter)
    }

    pub fn push_latency(&mut self) -> u64 {
        self.draw(self.model.push_latency_ns, self.model.transfer_jitter)
    }

    pub fn jump_latency(&mut self) -> u64 {
        self.draw(self.model.jump_latency_ns, self.model.jump_jitter)
    }
}
