//! Density-matrix checkpoints.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! offset  size            field
//! 0       7               magic "CATRHO1"
//! 7       8               cutoff N_c (u64)
//! 15      8               tau (f64)
//! 23      16·(N_c+1)²     entries, row-major, each (re: f64, im: f64)
//! ```
//!
//! The CSV form lists `n,m,re,im` for every entry with `|ρ_{nm}| > 1e-14`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;

pub const MAGIC: &[u8; 7] = b"CATRHO1";

/// Entries at or below this modulus are omitted from the CSV form.
pub const CSV_THRESHOLD: f64 = 1e-14;

pub fn write_binary<W: Write>(rho: &FockDensityMatrix, tau: f64, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(rho.cutoff() as u64).to_le_bytes())?;
    w.write_all(&tau.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * rho.as_slice().len());
    for z in rho.as_slice() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<(FockDensityMatrix, f64)> {
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Checkpoint(format!("header: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)
        .map_err(|e| Error::Checkpoint(format!("cutoff: {e}")))?;
    let cutoff = u64::from_le_bytes(word);
    if cutoff > 100_000 {
        return Err(Error::Checkpoint(format!("implausible cutoff {cutoff}")));
    }
    let cutoff = cutoff as usize;
    r.read_exact(&mut word)
        .map_err(|e| Error::Checkpoint(format!("tau: {e}")))?;
    let tau = f64::from_le_bytes(word);
    let count = (cutoff + 1) * (cutoff + 1);
    let mut bytes = vec![0u8; 16 * count];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::Checkpoint(format!("body: {e}")))?;
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok((FockDensityMatrix::from_row_major(cutoff, data)?, tau))
}

pub fn write_csv<W: Write>(rho: &FockDensityMatrix, mut w: W) -> Result<()> {
    writeln!(w, "n,m,re,im")?;
    let d = rho.dim();
    for n in 0..d {
        for m in 0..d {
            let z = rho[(n, m)];
            if z.norm() > CSV_THRESHOLD {
                writeln!(w, "{n},{m},{:.16e},{:.16e}", z.re, z.im)?;
            }
        }
    }
    Ok(())
}
