use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require, AccessTrace, Tracer, WorkloadParams};
use crate::error::Result;

/// Sequential scan for a key that only the final element holds.
pub fn gen_linear_search(params: &WorkloadParams) -> Result<AccessTrace> {
    let n = params.elements;
    require(n >= 1, || "linear search needs at least one element".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let key = u64::MAX;
    let mut data: Vec<u64> = (0..n).map(|_| rng.gen_range(0..u64::MAX)).collect();
    data[n as usize - 1] = key;

    let mut t = Tracer::new();
    let a = t.alloc(n, params.element_bytes)?;
    let mut found = None;
    for (i, x) in data.iter().enumerate() {
        t.touch(&a, i as u64);
        if *x == key {
            found = Some(i);
            break;
        }
    }
    assert_eq!(found, Some(n as usize - 1), "key must only sit in the last slot");
    t.finish(params.id())
}
