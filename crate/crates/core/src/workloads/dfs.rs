//! Depth-first search over a random tree laid out in construction
//! (level) order, so traversal order and memory layout disagree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require, AccessTrace, Region, Tracer, WorkloadParams};
use crate::error::{Result, SimError};

/// Bytes per node record.
pub const RECORD_BYTES: u64 = 48;

/// Level sizes of a tree with `nodes` nodes whose deepest level is `depth`.
/// Sizes grow geometrically; `max_branching` bounds the growth between
/// consecutive levels. With `nodes == 0` and a branching factor the tree is
/// the complete `branching`-ary tree of that depth.
pub fn dfs_level_sizes(nodes: u64, depth: u32, max_branching: Option<u32>) -> Result<Vec<u64>> {
    require(depth >= 1, || "dfs depth must be at least 1".into())?;
    if let Some(b) = max_branching {
        require(b >= 1, || "dfs branching must be at least 1".into())?;
    }
    if nodes == 0 {
        let b = max_branching
            .ok_or_else(|| SimError::InvalidWorkload("dfs needs a node count or a branching factor".into()))?
            as u64;
        let mut sizes = vec![1u64];
        for _ in 0..depth {
            let next = sizes.last().unwrap().checked_mul(b).filter(|n| *n < u32::MAX as u64);
            sizes.push(next.ok_or_else(|| SimError::InvalidWorkload("complete tree too large".into()))?);
        }
        return Ok(sizes);
    }
    require(nodes > depth as u64, || format!("{nodes} nodes cannot reach depth {depth}"))?;
    require(nodes < u32::MAX as u64, || "too many dfs nodes".into())?;

    // Growth ratio g with sum_{k=0..depth} g^k == nodes, by bisection.
    let total = |g: f64| (0..=depth).map(|k| g.powi(k as i32)).sum::<f64>();
    let (mut lo, mut hi) = (1.0f64, nodes as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < nodes as f64 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = 0.5 * (lo + hi);
    let mut sizes = Vec::with_capacity(depth as usize + 1);
    let mut used = 0u64;
    for k in 0..depth {
        let s = (g.powi(k as i32).round() as u64).max(1);
        sizes.push(s);
        used += s;
    }
    require(used < nodes, || "rounding left no room for the last level".into())?;
    sizes.push(nodes - used);
    if let Some(b) = max_branching {
        for w in sizes.windows(2) {
            require(w[1] <= w[0] * b as u64, || {
                format!("{nodes} nodes at depth {depth} need more than {b} children per node")
            })?;
        }
    }
    Ok(sizes)
}

/// Tree (plus optional cross edges) with node ids in level order. Out-edges
/// are stored as adjacency lists: tree children first, ascending, then
/// cross edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsTree {
    /// `offsets[u]..offsets[u + 1]` indexes `targets`.
    pub offsets: Vec<u32>,
    pub targets: Vec<u32>,
    pub child_count: Vec<u32>,
    pub level_sizes: Vec<u64>,
}

impl DfsTree {
    pub fn build(params: &WorkloadParams) -> Result<Self> {
        let depth = params
            .dfs_depth
            .ok_or_else(|| SimError::InvalidWorkload("dfs needs dfs_depth".into()))?;
        let sizes = dfs_level_sizes(params.elements, depth, params.dfs_branching)?;
        let cap = params.dfs_branching.unwrap_or(u32::MAX);
        let n: u64 = sizes.iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut child_count = vec![0u32; n as usize];
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n as usize);

        let mut base = 0u64;
        for k in 0..sizes.len() - 1 {
            let (parents, children) = (sizes[k], sizes[k + 1]);
            let window = params.dfs_window.unwrap_or(parents).min(parents);
            for j in 0..children {
                let centre = j * parents / children;
                let lo = centre.saturating_sub(window);
                let hi = (centre + window).min(parents - 1);
                let mut p = rng.gen_range(lo..=hi);
                let mut tries = 0;
                while child_count[(base + p) as usize] >= cap {
                    tries += 1;
                    p = if tries < 64 { rng.gen_range(lo..=hi) } else { rng.gen_range(0..parents) };
                }
                child_count[(base + p) as usize] += 1;
                edges.push(((base + p) as u32, (base + parents + j) as u32));
            }
            base += parents;
        }

        let tree_edges = edges.len();
        if let Some(frac) = params.dfs_extra_edges {
            require((0.0..=1.0).contains(&frac), || "dfs_extra_edges must be in [0,1]".into())?;
            let count = (frac * n as f64).round() as u64;
            for _ in 0..count {
                edges.push((rng.gen_range(0..n) as u32, rng.gen_range(0..n) as u32));
            }
        }
        // Stable by source keeps tree children ahead of cross edges.
        edges[..tree_edges].sort_unstable();
        edges.sort_by_key(|e| e.0);
        let mut offsets = vec![0u32; n as usize + 1];
        for (src, _) in &edges {
            offsets[*src as usize + 1] += 1;
        }
        for u in 0..n as usize {
            offsets[u + 1] += offsets[u];
        }
        let targets = edges.into_iter().map(|e| e.1).collect();
        Ok(Self { offsets, targets, child_count, level_sizes: sizes })
    }

    pub fn len(&self) -> usize {
        self.child_count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.child_count.is_empty()
    }

    pub fn has_cross_edges(&self) -> bool {
        self.targets.len() + 1 > self.len()
    }

    pub fn out_edges(&self, u: u32) -> &[u32] {
        &self.targets[self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize]
    }

    pub fn children(&self, u: u32) -> &[u32] {
        &self.out_edges(u)[..self.child_count[u as usize] as usize]
    }
}

/// Traversal with an explicit stack array, recording accesses to node
/// records, adjacency lists, the stack, and (when cross edges exist) the
/// visited flags.
pub fn gen_dfs(params: &WorkloadParams) -> Result<AccessTrace> {
    let tree = DfsTree::build(params)?;
    let n = tree.len() as u64;
    let max_stack = traverse(&tree, &mut NoTrace)?;

    let mut t = Tracer::new();
    let records = t.alloc(n, params.element_bytes)?;
    let edges = t.alloc(tree.targets.len().max(1) as u64, 4)?;
    let visited = if tree.has_cross_edges() { Some(t.alloc(n, 1)?) } else { None };
    let stack = t.alloc(max_stack as u64, 8)?;
    let mut sink = Recorder { t: &mut t, records, edges, visited, stack };
    traverse(&tree, &mut sink)?;
    t.finish(params.id())
}

trait DfsSink {
    fn record(&mut self, _u: u32) {}
    fn stack(&mut self, _slot: usize) {}
    fn edge(&mut self, _e: usize) {}
    fn visited(&mut self, _u: u32) {}
}

struct NoTrace;
impl DfsSink for NoTrace {}

struct Recorder<'a> {
    t: &'a mut Tracer,
    records: Region,
    edges: Region,
    visited: Option<Region>,
    stack: Region,
}

impl DfsSink for Recorder<'_> {
    fn record(&mut self, u: u32) {
        self.t.touch(&self.records, u as u64);
    }
    fn stack(&mut self, slot: usize) {
        self.t.touch(&self.stack, slot as u64);
    }
    fn edge(&mut self, e: usize) {
        self.t.touch(&self.edges, e as u64);
    }
    fn visited(&mut self, u: u32) {
        if let Some(r) = self.visited {
            self.t.touch(&r, u as u64);
        }
    }
}

/// Runs the traversal, returning the maximum stack depth reached. Each
/// stack frame holds a node and a cursor into its adjacency list; the
/// node's record is read again every time the traversal comes back to it.
fn traverse(tree: &DfsTree, sink: &mut impl DfsSink) -> Result<usize> {
    let check_visited = tree.has_cross_edges();
    let mut visited = vec![false; if check_visited { tree.len() } else { 0 }];
    let mut stack: Vec<(u32, u32)> = Vec::with_capacity(64);
    let mut max_depth = 1;
    let mut seen = 1usize;

    if check_visited {
        sink.visited(0);
        visited[0] = true;
    }
    sink.stack(0);
    stack.push((0, 0));
    sink.record(0);
    while let Some(&(u, i)) = stack.last() {
        let top = stack.len() - 1;
        sink.stack(top);
        sink.record(u);
        let first = tree.offsets[u as usize];
        if first + i == tree.offsets[u as usize + 1] {
            stack.pop();
            continue;
        }
        stack[top].1 += 1;
        let e = (first + i) as usize;
        sink.edge(e);
        let c = tree.targets[e];
        if check_visited {
            sink.visited(c);
            if std::mem::replace(&mut visited[c as usize], true) {
                continue;
            }
        }
        sink.stack(top + 1);
        stack.push((c, 0));
        sink.record(c);
        seen += 1;
        max_depth = max_depth.max(stack.len());
    }
    if seen != tree.len() {
        return Err(SimError::InvalidWorkload(format!("dfs reached {seen} of {} nodes", tree.len())));
    }
    Ok(max_depth)
}
