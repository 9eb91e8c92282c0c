//! Sorting workloads: block merge sort, heap sort and counting sort.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require, AccessTrace, Region, Tracer, WorkloadParams};
use crate::error::{Result, SimError};

/// Elements per block sorted in place before merging starts.
pub const BLOCK_ELEMENTS: u64 = 512;

fn random_data(n: u64, seed: u64, range: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..range)).collect()
}

fn ensure_sorted(data: &[u64], what: &str) -> Result<()> {
    if data.windows(2).all(|w| w[0] <= w[1]) {
        Ok(())
    } else {
        Err(SimError::InvalidWorkload(format!("{what} left the array unsorted")))
    }
}

/// Sorts fixed-size blocks in place, then merges runs bottom-up between the
/// array and an equally sized buffer. A merge step touches the element it
/// consumes and the output slot.
pub fn gen_block_sort(params: &WorkloadParams) -> Result<AccessTrace> {
    let n = params.elements;
    require(n >= 2, || "block sort needs at least two elements".into())?;
    let mut data = random_data(n, params.seed, u64::MAX);
    let mut t = Tracer::new();
    let a = t.alloc(n, params.element_bytes)?;
    let b = t.alloc(n, params.element_bytes)?;
    let sorted = block_sort_traced(&mut data, &mut t, a, b);
    ensure_sorted(&sorted, "block sort")?;
    t.finish(params.id())
}

fn block_sort_traced(data: &mut [u64], t: &mut Tracer, a: Region, b: Region) -> Vec<u64> {
    let n = data.len();
    let block = BLOCK_ELEMENTS as usize;
    for (k, chunk) in data.chunks_mut(block).enumerate() {
        let base = k * block;
        for i in 0..chunk.len() {
            t.touch(&a, (base + i) as u64);
        }
        chunk.sort_unstable();
    }

    let mut src = data.to_vec();
    let mut dst = vec![0u64; n];
    let (mut rs, mut rd) = (a, b);
    let mut width = block;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j) = (lo, mid);
            for (k, slot) in dst.iter_mut().enumerate().take(hi).skip(lo) {
                let take_left = j >= hi || (i < mid && src[i] <= src[j]);
                let from = if take_left { i } else { j };
                t.touch(&rs, from as u64);
                t.touch(&rd, k as u64);
                *slot = src[from];
                if take_left {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        std::mem::swap(&mut rs, &mut rd);
        width *= 2;
    }
    src
}

/// In-place heap sort with hole-based sift-down.
pub fn gen_heap_sort(params: &WorkloadParams) -> Result<AccessTrace> {
    let n = params.elements;
    require(n >= 2, || "heap sort needs at least two elements".into())?;
    let mut data = random_data(n, params.seed, u64::MAX);
    let mut t = Tracer::new();
    let a = t.alloc(n, params.element_bytes)?;
    heap_sort_traced(&mut data, &mut t, &a);
    ensure_sorted(&data, "heap sort")?;
    t.finish(params.id())
}

fn sift_down(a: &mut [u64], start: usize, end: usize, t: &mut Tracer, r: &Region) {
    t.touch(r, start as u64);
    let x = a[start];
    let mut hole = start;
    loop {
        let mut child = 2 * hole + 1;
        if child >= end {
            break;
        }
        t.touch(r, child as u64);
        if child + 1 < end {
            t.touch(r, (child + 1) as u64);
            if a[child + 1] > a[child] {
                child += 1;
            }
        }
        if a[child] <= x {
            break;
        }
        t.touch(r, hole as u64);
        a[hole] = a[child];
        hole = child;
    }
    t.touch(r, hole as u64);
    a[hole] = x;
}

fn heap_sort_traced(a: &mut [u64], t: &mut Tracer, r: &Region) {
    let n = a.len();
    for i in (0..n / 2).rev() {
        sift_down(a, i, n, t, r);
    }
    for end in (1..n).rev() {
        t.touch(r, 0);
        t.touch(r, end as u64);
        a.swap(0, end);
        sift_down(a, 0, end, t, r);
    }
}

/// Counting sort that rewrites the input array from the count table.
pub fn gen_count_sort(params: &WorkloadParams) -> Result<AccessTrace> {
    let n = params.elements;
    require(n >= 1, || "count sort needs at least one element".into())?;
    let keys = params.key_range.unwrap_or(4096);
    require(keys >= 1, || "key range must be positive".into())?;
    let mut data = random_data(n, params.seed, keys);
    let mut t = Tracer::new();
    let a = t.alloc(n, params.element_bytes)?;
    let c = t.alloc(keys, 8)?;
    count_sort_traced(&mut data, keys, &mut t, &a, &c);
    ensure_sorted(&data, "count sort")?;
    t.finish(params.id())
}

fn count_sort_traced(data: &mut [u64], keys: u64, t: &mut Tracer, a: &Region, c: &Region) {
    let mut counts = vec![0u64; keys as usize];
    for (i, x) in data.iter().enumerate() {
        t.touch(a, i as u64);
        t.touch(c, *x);
        counts[*x as usize] += 1;
    }
    let mut j = 0usize;
    for (k, &count) in counts.iter().enumerate() {
        t.touch(c, k as u64);
        for _ in 0..count {
            t.touch(a, j as u64);
            data[j] = k as u64;
            j += 1;
        }
    }
}
