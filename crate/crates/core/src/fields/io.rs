use std::io::{BufRead, Write};

use super::ScalarField;
use crate::error::{Error, Result};

/// Header line `L n`, then `n³` little-endian doubles x-fastest. The padding
/// of free-space fields is not stored.
pub fn write_fld<W: Write>(field: &ScalarField, mut w: W) -> Result<()> {
    writeln!(w, "{:?} {}", field.l, field.n)?;
    let mut bytes = Vec::with_capacity(8 * field.values.len());
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_fld<R: BufRead>(mut r: R) -> Result<ScalarField> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let bad = || Error::Format(format!("bad .fld header {header:?}"));
    let mut parts = header.split_whitespace();
    let l: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let n: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() || !(l > 0.0 && l.is_finite()) || n == 0 {
        return Err(bad());
    }
    let mut bytes = vec![0u8; 8 * n * n * n];
    r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated .fld body: {e}")))?;
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(ScalarField { l, n, pad: 0, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let f = ScalarField::sample(1.5, 5, |x| x[0].sin() * x[1] - x[2] / 3.0);
        let mut buf = Vec::new();
        write_fld(&f, &mut buf).unwrap();
        assert!(buf.starts_with(b"1.5 5\n"));
        let back = read_fld(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn malformed_input() {
        assert!(read_fld(&b"1.0 2\n\x00\x01"[..]).is_err());
        assert!(read_fld(&b"-1.0 2\n"[..]).is_err());
    }
}
