//! Deterministic access-trace generators.
//!
//! Each generator runs a reference implementation of its algorithm over a
//! paged virtual address space and records the page of every load and
//! store to the principal data structures. Consecutive accesses to the same
//! page are coalesced into one trace entry.

mod dfs;
mod dijkstra;
mod linear;
mod sorts;
mod tracefile;

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::model::{Vpn, PAGE_SIZE};
use crate::primitives::SyncKind;

pub use dfs::{dfs_level_sizes, gen_dfs, DfsTree};
pub use dijkstra::gen_dijkstra;
pub use linear::gen_linear_search;
pub use sorts::{gen_block_sort, gen_count_sort, gen_heap_sort, BLOCK_ELEMENTS};
pub use tracefile::{read_trace, write_trace, TRACE_MAGIC, TRACE_VERSION};

/// A sync event to emit just before the access at `at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncPoint {
    pub at: usize,
    pub kind: SyncKind,
}

/// Page-granular reference stream of one workload instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessTrace {
    pub accesses: Vec<Vpn>,
    pub footprint_pages: usize,
    pub workload_id: String,
    pub sync_points: Vec<SyncPoint>,
}

impl AccessTrace {
    pub fn new(accesses: Vec<Vpn>, footprint_pages: usize, workload_id: impl Into<String>) -> Result<Self> {
        let trace = Self {
            accesses,
            footprint_pages,
            workload_id: workload_id.into(),
            sync_points: Vec::new(),
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn len(&self) -> usize {
        self.accesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accesses.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.footprint_pages == 0 {
            return Err(SimError::TraceFormat("empty footprint".into()));
        }
        if let Some(v) = self.accesses.iter().find(|v| v.index() >= self.footprint_pages) {
            return Err(SimError::InvalidAddress(*v));
        }
        if let Some(p) = self.sync_points.iter().find(|p| p.at > self.accesses.len()) {
            return Err(SimError::TraceFormat(format!("sync point at {} past end of trace", p.at)));
        }
        Ok(())
    }

    /// Number of positions where the page differs from the previous entry.
    pub fn page_transitions(&self) -> usize {
        self.accesses.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Merges runs of identical consecutive pages.
    pub fn coalesced(&self) -> AccessTrace {
        let mut out = Vec::with_capacity(self.accesses.len());
        let mut remap = Vec::with_capacity(self.accesses.len() + 1);
        // A sync point before a folded repeat moves to the next kept entry.
        for (i, v) in self.accesses.iter().enumerate() {
            remap.push(out.len());
            if i == 0 || self.accesses[i - 1] != *v {
                out.push(*v);
            }
        }
        remap.push(out.len());
        AccessTrace {
            accesses: out,
            footprint_pages: self.footprint_pages,
            workload_id: self.workload_id.clone(),
            sync_points: self
                .sync_points
                .iter()
                .map(|p| SyncPoint { at: remap[p.at], kind: p.kind })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkloadKind {
    LinearSearch,
    Dfs,
    Dijkstra,
    BlockSort,
    HeapSort,
    CountSort,
}

impl WorkloadKind {
    pub const ALL: [WorkloadKind; 6] = [
        WorkloadKind::Dfs,
        WorkloadKind::LinearSearch,
        WorkloadKind::Dijkstra,
        WorkloadKind::BlockSort,
        WorkloadKind::HeapSort,
        WorkloadKind::CountSort,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorkloadKind::LinearSearch => "linear-search",
            WorkloadKind::Dfs => "dfs",
            WorkloadKind::Dijkstra => "dijkstra",
            WorkloadKind::BlockSort => "block-sort",
            WorkloadKind::HeapSort => "heap-sort",
            WorkloadKind::CountSort => "count-sort",
        }
    }

    /// Trace repetitions used by the desk suite. A single scan of a
    /// two-node array is dominated by the initial stretch, so linear search
    /// scans twice.
    pub fn desk_repeats(self) -> u32 {
        match self {
            WorkloadKind::LinearSearch => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkloadKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        WorkloadKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('-', "_") == s)
            .ok_or_else(|| SimError::InvalidWorkload(format!("unknown workload {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadParams {
    pub kind: WorkloadKind,
    /// Array length, graph vertices or tree nodes.
    pub elements: u64,
    pub element_bytes: u64,
    pub seed: u64,
    pub dfs_depth: Option<u32>,
    pub dfs_branching: Option<u32>,
    /// Cross edges added to the DFS tree, as a fraction of its node count.
    pub dfs_extra_edges: Option<f64>,
    /// A DFS node attaches to a parent at most this many slots away from
    /// its proportional position in the level above; unrestricted if unset.
    pub dfs_window: Option<u64>,
    /// Edge probability between vertices inside the Dijkstra band.
    pub connectivity: Option<f64>,
    /// Half-width of the Dijkstra edge band, in vertices.
    pub band: Option<u64>,
    /// Dijkstra stops once the nearest unsettled vertex is farther than this.
    pub max_distance: Option<u64>,
    /// Number of distinct keys for count sort.
    pub key_range: Option<u64>,
}

impl WorkloadParams {
    pub fn new(kind: WorkloadKind, elements: u64, seed: u64) -> Self {
        let element_bytes = match kind {
            WorkloadKind::Dijkstra => 4,
            WorkloadKind::Dfs => dfs::RECORD_BYTES,
            _ => 8,
        };
        Self {
            kind,
            elements,
            element_bytes,
            seed,
            dfs_depth: None,
            dfs_branching: None,
            dfs_extra_edges: None,
            dfs_window: None,
            connectivity: None,
            band: None,
            max_distance: None,
            key_range: None,
        }
    }

    /// Desk-scale defaults: footprints close to twice a 4096-page node.
    pub fn desk_default(kind: WorkloadKind, seed: u64) -> Self {
        let mut p = match kind {
            WorkloadKind::LinearSearch => Self::new(kind, 3_840_000, seed),
            WorkloadKind::Dfs => Self::new(kind, 610_000, seed),
            WorkloadKind::Dijkstra => Self::new(kind, 2_750, seed),
            WorkloadKind::BlockSort => Self::new(kind, 1_900_000, seed),
            WorkloadKind::HeapSort => Self::new(kind, 3_800_000, seed),
            WorkloadKind::CountSort => Self::new(kind, 3_800_000, seed),
        };
        match kind {
            WorkloadKind::Dfs => {
                p.dfs_depth = Some(8);
                p.dfs_window = Some(3);
            }
            WorkloadKind::Dijkstra => {
                p.connectivity = Some(0.05);
                p.band = Some(64);
                p.max_distance = Some(500);
            }
            WorkloadKind::CountSort => p.key_range = Some(4096),
            _ => {}
        }
        p
    }

    /// Stable textual id used to check that two runs replay the same trace.
    pub fn id(&self) -> String {
        let mut s = format!(
            "{}(n={},eb={},seed={}",
            self.kind, self.elements, self.element_bytes, self.seed
        );
        if let Some(d) = self.dfs_depth {
            s += &format!(",depth={d}");
        }
        if let Some(b) = self.dfs_branching {
            s += &format!(",branching={b}");
        }
        if let Some(x) = self.dfs_extra_edges {
            s += &format!(",extra={x}");
        }
        if let Some(w) = self.dfs_window {
            s += &format!(",window={w}");
        }
        if let Some(c) = self.connectivity {
            s += &format!(",conn={c}");
        }
        if let Some(b) = self.band {
            s += &format!(",band={b}");
        }
        if let Some(d) = self.max_distance {
            s += &format!(",maxdist={d}");
        }
        if let Some(k) = self.key_range {
            s += &format!(",keys={k}");
        }
        s.push(')');
        s
    }

    pub fn generate(&self) -> Result<AccessTrace> {
        match self.kind {
            WorkloadKind::LinearSearch => gen_linear_search(self),
            WorkloadKind::Dfs => gen_dfs(self),
            WorkloadKind::Dijkstra => gen_dijkstra(self),
            WorkloadKind::BlockSort => gen_block_sort(self),
            WorkloadKind::HeapSort => gen_heap_sort(self),
            WorkloadKind::CountSort => gen_count_sort(self),
        }
    }
}

/// A page-aligned array in the traced address space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    base_page: u64,
    elem_bytes: u64,
    len: u64,
}

impl Region {
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pages(&self) -> u64 {
        (self.len * self.elem_bytes).div_ceil(PAGE_SIZE)
    }

    #[inline]
    pub fn page_of(&self, i: u64) -> u64 {
        debug_assert!(i < self.len, "index {i} outside region of {}", self.len);
        self.base_page + i * self.elem_bytes / PAGE_SIZE
    }
}

/// Allocates regions and records page accesses.
#[derive(Debug)]
pub struct Tracer {
    accesses: Vec<Vpn>,
    next_page: u64,
    coalesce: bool,
    sync_points: Vec<SyncPoint>,
}

impl Default for Tracer {
    fn default() -> Self {
        Self::new()
    }
}

impl Tracer {
    pub fn new() -> Self {
        Self { accesses: Vec::new(), next_page: 0, coalesce: true, sync_points: Vec::new() }
    }

    /// Records every access, including repeats of the previous page.
    pub fn uncoalesced() -> Self {
        Self { coalesce: false, ..Self::new() }
    }

    /// Maps a new array; emits one map-region sync event.
    pub fn alloc(&mut self, len: u64, elem_bytes: u64) -> Result<Region> {
        if len == 0 || elem_bytes == 0 {
            return Err(SimError::InvalidWorkload("empty allocation".into()));
        }
        let region = Region { base_page: self.next_page, elem_bytes, len };
        self.next_page += region.pages();
        if self.next_page >= u32::MAX as u64 {
            return Err(SimError::InvalidWorkload("footprint exceeds 32-bit page numbers".into()));
        }
        self.sync_points.push(SyncPoint { at: self.accesses.len(), kind: SyncKind::MapRegion });
        Ok(region)
    }

    #[inline]
    pub fn touch(&mut self, region: &Region, i: u64) {
        let v = Vpn(region.page_of(i) as u32);
        if self.coalesce && self.accesses.last() == Some(&v) {
            return;
        }
        self.accesses.push(v);
    }

    pub fn footprint_pages(&self) -> u64 {
        self.next_page
    }

    pub fn finish(self, workload_id: String) -> Result<AccessTrace> {
        let trace = AccessTrace {
            accesses: self.accesses,
            footprint_pages: self.next_page as usize,
            workload_id,
            sync_points: self.sync_points,
        };
        trace.validate()?;
        Ok(trace)
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(SimError::InvalidWorkload(msg()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_are_page_aligned() {
        let mut t = Tracer::new();
        let a = t.alloc(600, 8).unwrap();
        let b = t.alloc(10, 4).unwrap();
        assert_eq!(a.pages(), 2);
        assert_eq!(b.page_of(0), 2);
        assert_eq!(t.footprint_pages(), 3);
        assert_eq!(a.page_of(511), 0);
        assert_eq!(a.page_of(512), 1);
    }

    #[test]
    fn tracer_coalesces_repeats() {
        let mut t = Tracer::new();
        let a = t.alloc(1024, 8).unwrap();
        for i in 0..1024 {
            t.touch(&a, i);
        }
        t.touch(&a, 0);
        let trace = t.finish("x".into()).unwrap();
        assert_eq!(trace.accesses, vec![Vpn(0), Vpn(1), Vpn(0)]);
        assert_eq!(trace.sync_points, vec![SyncPoint { at: 0, kind: SyncKind::MapRegion }]);
    }

    #[test]
    fn coalesced_remaps_sync_points() {
        let mut trace = AccessTrace::new(vec![Vpn(0), Vpn(0), Vpn(1), Vpn(1), Vpn(1)], 2, "t").unwrap();
        trace.sync_points = vec![
            SyncPoint { at: 0, kind: SyncKind::MapRegion },
            SyncPoint { at: 3, kind: SyncKind::MapRegion },
            SyncPoint { at: 5, kind: SyncKind::CloseFile },
        ];
        let c = trace.coalesced();
        assert_eq!(c.accesses, vec![Vpn(0), Vpn(1)]);
        assert_eq!(c.sync_points.iter().map(|p| p.at).collect::<Vec<_>>(), vec![0, 2, 2]);
    }

    #[test]
    fn trace_validation() {
        assert!(AccessTrace::new(vec![Vpn(3)], 3, "t").is_err());
        assert!(AccessTrace::new(vec![], 0, "t").is_err());
    }

    #[test]
    fn kinds_round_trip_names() {
        for k in WorkloadKind::ALL {
            assert_eq!(k.name().parse::<WorkloadKind>().unwrap(), k);
        }
        assert!("bogo-sort".parse::<WorkloadKind>().is_err());
    }

    #[test]
    fn desk_defaults_fit_two_nodes() {
        for k in WorkloadKind::ALL {
            let p = WorkloadParams::desk_default(k, 1);
            let t = p.generate().unwrap();
            assert!(t.footprint_pages <= 8192, "{k}: {}", t.footprint_pages);
            assert!(t.footprint_pages > 7000, "{k}: {}", t.footprint_pages);
            assert_eq!(
                t.accesses.iter().map(|v| v.index()).max().unwrap() + 1,
                t.footprint_pages,
                "{k}: last page untouched"
            );
        }
    }
}
