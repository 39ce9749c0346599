//! Binary state dump for debugging.
//!
//! Layout: magic `EVDS`, `u32` kind (0 = vector, 1 = matrix), `u32` register
//! count, one `u64` per register dimension, then row-major entries as
//! little-endian `(re, im)` pairs of `f64`.

use std::io::{self, Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::state::{DensityMatrix, Layout, StateVector};

const MAGIC: &[u8; 4] = b"EVDS";

fn write_header<W: Write>(w: &mut W, kind: u32, layout: &Layout) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&kind.to_le_bytes())?;
    w.write_all(&(layout.len() as u32).to_le_bytes())?;
    for &d in layout.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    Ok(())
}

fn write_entries<'a, W: Write>(w: &mut W, entries: impl Iterator<Item = &'a Complex64>) -> io::Result<()> {
    for z in entries {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_state<W: Write>(w: &mut W, state: &StateVector) -> io::Result<()> {
    write_header(w, 0, state.layout())?;
    write_entries(w, state.amplitudes().iter())
}

pub fn write_density<W: Write>(w: &mut W, rho: &DensityMatrix) -> io::Result<()> {
    write_header(w, 1, rho.layout())?;
    let m = rho.matrix();
    let d = m.nrows();
    let row_major: Vec<Complex64> = (0..d * d).map(|i| m[(i / d, i % d)]).collect();
    write_entries(w, row_major.iter())
}

/// A dump read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Dump {
    State(StateVector),
    Density(DensityMatrix),
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn bad(msg: impl ToString) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_dump<R: Read>(r: &mut R) -> io::Result<Dump> {
    let mut magic = [0; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a state dump"));
    }
    let kind = read_u32(r)?;
    let count = read_u32(r)?;
    let dims = (0..count).map(|_| read_u64(r).map(|d| d as usize)).collect::<io::Result<Vec<_>>>()?;
    let layout = Layout::new(dims).map_err(bad)?;
    let n = if kind == 0 { layout.size() } else { layout.size() * layout.size() };
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let re = f64::from_bits(read_u64(r)?);
        let im = f64::from_bits(read_u64(r)?);
        entries.push(Complex64::new(re, im));
    }
    match kind {
        0 => Ok(Dump::State(StateVector::new(layout, entries).map_err(bad)?)),
        1 => {
            let d = layout.size();
            let m = DMatrix::from_row_slice(d, d, &entries);
            Ok(Dump::Density(DensityMatrix::new(layout, m).map_err(bad)?))
        }
        other => Err(bad(format!("unknown dump kind {other}"))),
    }
}
