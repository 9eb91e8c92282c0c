//! Single-source shortest paths on an adjacency matrix, with the classic
//! linear scan for the nearest unsettled vertex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require, AccessTrace, Region, Tracer, WorkloadParams};
use crate::error::Result;

const INF: u64 = u64::MAX;
const MAX_WEIGHT: u32 = 100;

/// Symmetric weight matrix; zero means no edge. Edges only join vertices
/// at most `band` apart.
#[derive(Debug, Clone)]
pub(crate) struct Graph {
    pub v: usize,
    pub w: Vec<u32>,
}

impl Graph {
    pub fn build(params: &WorkloadParams) -> Result<Self> {
        let v = params.elements as usize;
        require(v >= 1, || "dijkstra needs at least one vertex".into())?;
        require(v <= 1 << 15, || format!("{v} vertices is too many for a dense matrix"))?;
        let c = params.connectivity.unwrap_or(1.0);
        require(c > 0.0 && c <= 1.0, || format!("connectivity {c} outside (0,1]"))?;
        let band = params.band.map_or(v, |b| b as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut w = vec![0u32; v * v];
        for i in 0..v {
            for j in i + 1..v.min(i + band + 1) {
                if rng.gen_bool(c) {
                    let x = rng.gen_range(1..=MAX_WEIGHT);
                    w[i * v + j] = x;
                    w[j * v + i] = x;
                }
            }
        }
        Ok(Self { v, w })
    }

    #[inline]
    fn weight(&self, u: usize, x: usize) -> u32 {
        self.w[u * self.v + x]
    }
}

trait Sink {
    fn matrix(&mut self, _u: usize, _x: usize) {}
    fn dist(&mut self, _x: usize) {}
    fn visited(&mut self, _x: usize) {}
}

#[cfg(test)]
struct Quiet;
#[cfg(test)]
impl Sink for Quiet {}

struct Recorder<'a> {
    t: &'a mut Tracer,
    v: usize,
    matrix: Region,
    dist: Region,
    visited: Region,
}

impl Sink for Recorder<'_> {
    fn matrix(&mut self, u: usize, x: usize) {
        self.t.touch(&self.matrix, (u * self.v + x) as u64);
    }
    fn dist(&mut self, x: usize) {
        self.t.touch(&self.dist, x as u64);
    }
    fn visited(&mut self, x: usize) {
        self.t.touch(&self.visited, x as u64);
    }
}

/// Distances from vertex 0; `INF` for vertices left unsettled.
fn shortest_paths(g: &Graph, max_distance: u64, sink: &mut impl Sink) -> Vec<u64> {
    let n = g.v;
    let mut dist = vec![INF; n];
    let mut visited = vec![false; n];
    dist[0] = 0;
    sink.dist(0);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        let mut min = INF;
        for x in 0..n {
            sink.visited(x);
            if !visited[x] {
                sink.dist(x);
                if dist[x] < min {
                    min = dist[x];
                    best = Some(x);
                }
            }
        }
        let u = match best {
            Some(u) if min <= max_distance => u,
            _ => break,
        };
        sink.visited(u);
        visited[u] = true;
        for x in 0..n {
            sink.visited(x);
            if visited[x] {
                continue;
            }
            sink.matrix(u, x);
            let w = g.weight(u, x);
            if w != 0 {
                sink.dist(u);
                sink.dist(x);
                let alt = dist[u] + w as u64;
                if alt < dist[x] {
                    dist[x] = alt;
                }
            }
        }
    }
    for (x, v) in visited.iter().enumerate() {
        if !v {
            dist[x] = INF;
        }
    }
    dist
}

/// Settled distances must be tight: every settled vertex other than the
/// source has a settled predecessor achieving its distance, and no edge
/// between settled vertices offers a shortcut.
fn check(g: &Graph, dist: &[u64]) -> Result<()> {
    for x in 0..g.v {
        if dist[x] == INF || x == 0 {
            continue;
        }
        let mut tight = false;
        for u in 0..g.v {
            let w = g.weight(u, x);
            if w == 0 || dist[u] == INF {
                continue;
            }
            require(dist[x] <= dist[u] + w as u64, || format!("edge {u}->{x} shortens dist"))?;
            tight |= dist[x] == dist[u] + w as u64;
        }
        require(tight, || format!("vertex {x} has no predecessor"))?;
    }
    Ok(())
}

pub fn gen_dijkstra(params: &WorkloadParams) -> Result<AccessTrace> {
    let g = Graph::build(params)?;
    let max_distance = params.max_distance.unwrap_or(INF - 1);
    let mut t = Tracer::new();
    let n = g.v as u64;
    let matrix = t.alloc(n * n, params.element_bytes)?;
    let dist = t.alloc(n, 4)?;
    let visited = t.alloc(n, 1)?;
    let mut rec = Recorder { t: &mut t, v: g.v, matrix, dist, visited };
    let d = shortest_paths(&g, max_distance, &mut rec);
    check(&g, &d)?;
    t.finish(params.id())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workloads::WorkloadKind;

    fn params(v: u64, c: f64, band: u64) -> WorkloadParams {
        let mut p = WorkloadParams::new(WorkloadKind::Dijkstra, v, 9);
        p.connectivity = Some(c);
        p.band = Some(band);
        p
    }

    fn bellman_ford(g: &Graph) -> Vec<u64> {
        let mut d = vec![INF; g.v];
        d[0] = 0;
        for _ in 0..g.v {
            let mut changed = false;
            for u in 0..g.v {
                if d[u] == INF {
                    continue;
                }
                for x in 0..g.v {
                    let w = g.weight(u, x);
                    if w != 0 && d[u] + (w as u64) < d[x] {
                        d[x] = d[u] + w as u64;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    #[test]
    fn matches_bellman_ford() {
        for (c, band) in [(0.3, 5), (0.05, 40), (1.0, 200)] {
            let g = Graph::build(&params(200, c, band)).unwrap();
            assert_eq!(shortest_paths(&g, INF - 1, &mut Quiet), bellman_ford(&g), "c={c} band={band}");
        }
    }

    #[test]
    fn cutoff_leaves_far_vertices_unsettled() {
        let g = Graph::build(&params(300, 0.2, 8)).unwrap();
        let full = shortest_paths(&g, INF - 1, &mut Quiet);
        let cut = shortest_paths(&g, 150, &mut Quiet);
        for x in 0..g.v {
            if full[x] <= 150 {
                assert_eq!(cut[x], full[x]);
            } else {
                assert_eq!(cut[x], INF);
            }
        }
    }

    #[test]
    fn disconnected_graph_touches_only_source_row() {
        // One row per page.
        let t = gen_dijkstra(&params(1024, 1.0, 0)).unwrap();
        let matrix_pages = 1024u32;
        let rows: Vec<u32> = t.accesses.iter().map(|v| v.0).filter(|p| *p < matrix_pages).collect();
        assert!(rows.iter().all(|p| *p == 0));
        assert!(!rows.is_empty());
        assert_eq!(t.footprint_pages, 1024 + 1 + 1);
    }

    #[test]
    fn each_row_is_scanned_once() {
        let t = gen_dijkstra(&params(1024, 0.5, 32)).unwrap();
        let mut rows: Vec<u32> = t.accesses.iter().map(|v| v.0).filter(|p| *p < 1024).collect();
        rows.dedup();
        let mut sorted = rows.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(rows.len(), sorted.len());
        // the last vertex settled has nothing left to relax
        assert_eq!(rows.len(), 1023);
    }

    #[test]
    fn matrix_accesses_are_a_small_share() {
        let t = gen_dijkstra(&params(1024, 0.5, 32)).unwrap();
        // the nearest-vertex scans dominate the trace
        let matrix = t.accesses.iter().filter(|v| v.0 < 1024).count();
        assert!(matrix * 3 < t.len(), "{matrix} of {}", t.len());
    }

    #[test]
    fn deterministic() {
        let p = params(500, 0.1, 20);
        assert_eq!(gen_dijkstra(&p).unwrap(), gen_dijkstra(&p).unwrap());
    }

    #[test]
    fn bad_connectivity_rejected() {
        assert!(gen_dijkstra(&params(10, 0.0, 3)).is_err());
        assert!(gen_dijkstra(&params(10, 1.5, 3)).is_err());
    }
}
