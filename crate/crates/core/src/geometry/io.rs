use std::io::{BufRead, Write};

use super::VoxelSet;
use crate::error::{Error, Result};

/// Header line `L n`, then `n³` occupancy bits x-fastest, eight per byte,
/// least significant bit first.
pub fn write_vox<W: Write>(set: &VoxelSet, mut w: W) -> Result<()> {
    writeln!(w, "{:?} {}", set.l(), set.n())?;
    let occ = set.occupancy();
    let mut bytes = vec![0u8; occ.len().div_ceil(8)];
    for (i, b) in occ.iter().enumerate() {
        if *b {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_vox<R: BufRead>(mut r: R) -> Result<VoxelSet> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut parts = header.split_whitespace();
    let l: f64 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad .vox header {header:?}")))?;
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad .vox header {header:?}")))?;
    if parts.next().is_some() {
        return Err(Error::Format(format!("bad .vox header {header:?}")));
    }
    let cells = n * n * n;
    let mut bytes = vec![0u8; cells.div_ceil(8)];
    r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated .vox body: {e}")))?;
    let occ = (0..cells).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
    VoxelSet::from_occupancy(l, n, occ)
}
