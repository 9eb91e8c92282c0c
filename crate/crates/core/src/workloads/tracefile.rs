//! Flat binary trace files.
//!
//! Layout (all little-endian): four u64 header words `magic`, `version`,
//! `footprint_pages`, `count`, then `count` u32 page numbers. Sync points
//! are not stored.

use std::io::{Read, Write};

use super::AccessTrace;
use crate::error::{Result, SimError};
use crate::model::Vpn;

/// "ELTRACE1" read as a little-endian u64.
pub const TRACE_MAGIC: u64 = u64::from_le_bytes(*b"ELTRACE1");
pub const TRACE_VERSION: u64 = 1;

fn io_err(e: std::io::Error) -> SimError {
    SimError::TraceFormat(e.to_string())
}

pub fn write_trace<W: Write>(mut w: W, trace: &AccessTrace) -> Result<()> {
    for word in [TRACE_MAGIC, TRACE_VERSION, trace.footprint_pages as u64, trace.accesses.len() as u64] {
        w.write_all(&word.to_le_bytes()).map_err(io_err)?;
    }
    let mut buf = Vec::with_capacity(trace.accesses.len() * 4);
    for v in &trace.accesses {
        buf.extend_from_slice(&v.0.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn read_trace<R: Read>(mut r: R, workload_id: impl Into<String>) -> Result<AccessTrace> {
    let mut header = [0u8; 32];
    r.read_exact(&mut header).map_err(io_err)?;
    let word = |i: usize| u64::from_le_bytes(header[i * 8..i * 8 + 8].try_into().unwrap());
    if word(0) != TRACE_MAGIC {
        return Err(SimError::TraceFormat("bad magic".into()));
    }
    if word(1) != TRACE_VERSION {
        return Err(SimError::TraceFormat(format!("unsupported version {}", word(1))));
    }
    let footprint = usize::try_from(word(2)).map_err(|_| SimError::TraceFormat("footprint overflow".into()))?;
    let count = usize::try_from(word(3)).map_err(|_| SimError::TraceFormat("count overflow".into()))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(io_err)?;
    if body.len() != count * 4 {
        return Err(SimError::TraceFormat(format!(
            "expected {} bytes of page numbers, found {}",
            count * 4,
            body.len()
        )));
    }
    let accesses = body
        .chunks_exact(4)
        .map(|c| Vpn(u32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    AccessTrace::new(accesses, footprint, workload_id)
}
