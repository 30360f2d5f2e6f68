//! Binary snapshots and CSV slices.
//!
//! Binary layout (all little-endian):
//!
//! | field        | type | meaning                                   |
//! |--------------|------|-------------------------------------------|
//! | `dim`        | u32  | spatial dimension (1 or 2)                |
//! | `n`          | u32  | lattice points per axis                   |
//! | `side`       | f64  | box side length                           |
//! | `m`          | u32  | velocity nodes (0 for plain fields)       |
//! | `lambda_lo`  | f64  | velocity interval start (0 when `m = 0`)  |
//! | `lambda_hi`  | f64  | velocity interval end (0 when `m = 0`)    |
//! | payload      | f64… | `max(m,1) · n^dim` values, row-major, λ-major slabs |
//!
//! Bytes are preserved exactly: reading a written snapshot reproduces every
//! f64 bit pattern.

use std::io::{Read, Write};

use super::field::{KineticField, ScalarField};
use super::{LambdaGrid, SpaceGrid};
use crate::error::{Error, Result};

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|e| Error::data(format!("truncated header: {e}")))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|e| Error::data(format!("truncated header: {e}")))?;
    Ok(f64::from_le_bytes(buf))
}

fn write_header(
    w: &mut impl Write,
    grid: &SpaceGrid,
    lambda: Option<&LambdaGrid>,
) -> Result<()> {
    write_u32(w, grid.dim() as u32)?;
    write_u32(w, grid.n() as u32)?;
    write_f64(w, grid.side())?;
    match lambda {
        Some(l) => {
            write_u32(w, l.m() as u32)?;
            write_f64(w, l.lo())?;
            write_f64(w, l.hi())?;
        }
        None => {
            write_u32(w, 0)?;
            write_f64(w, 0.0)?;
            write_f64(w, 0.0)?;
        }
    }
    Ok(())
}

fn write_payload(w: &mut impl Write, values: &[f64]) -> Result<()> {
    // Chunked conversion keeps memory flat while avoiding one syscall per value.
    let mut buf = Vec::with_capacity(8 * 4096);
    for chunk in values.chunks(4096) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_payload(r: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(count);
    let mut buf = [0u8; 8 * 512];
    let mut remaining = count;
    while remaining > 0 {
        let take = remaining.min(512);
        let bytes = &mut buf[..8 * take];
        r.read_exact(bytes)
            .map_err(|e| Error::data(format!("truncated payload ({remaining} values left): {e}")))?;
        for b in bytes.chunks_exact(8) {
            values.push(f64::from_le_bytes(b.try_into().expect("chunk of 8")));
        }
        remaining -= take;
    }
    Ok(values)
}

struct Header {
    grid: SpaceGrid,
    lambda: Option<LambdaGrid>,
}

fn read_header(r: &mut impl Read) -> Result<Header> {
    let dim = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    let side = read_f64(r)?;
    let m = read_u32(r)? as usize;
    let lo = read_f64(r)?;
    let hi = read_f64(r)?;
    let grid = SpaceGrid::new(dim, n, side)
        .map_err(|e| Error::data(format!("header describes an invalid grid: {e}")))?;
    let lambda = if m == 0 {
        None
    } else {
        Some(
            LambdaGrid::new(lo, hi, m)
                .map_err(|e| Error::data(format!("header describes an invalid velocity grid: {e}")))?,
        )
    };
    Ok(Header { grid, lambda })
}

/// Writes a spatial field as a binary snapshot.
pub fn write_scalar(field: &ScalarField, w: &mut impl Write) -> Result<()> {
    write_header(w, field.grid(), None)?;
    write_payload(w, field.data())
}

/// Reads a spatial field from a binary snapshot.
pub fn read_scalar(r: &mut impl Read) -> Result<ScalarField> {
    let header = read_header(r)?;
    if header.lambda.is_some() {
        return Err(Error::data(
            "snapshot holds a kinetic field; use read_kinetic".to_string(),
        ));
    }
    let values = read_payload(r, header.grid.len())?;
    ScalarField::from_data(header.grid, values)
}

/// Writes a kinetic field as a binary snapshot.
pub fn write_kinetic(field: &KineticField, w: &mut impl Write) -> Result<()> {
    write_header(w, field.grid(), Some(field.lambda()))?;
    write_payload(w, field.data())
}

/// Reads a kinetic field from a binary snapshot.
pub fn read_kinetic(r: &mut impl Read) -> Result<KineticField> {
    let header = read_header(r)?;
    let lambda = header
        .lambda
        .ok_or_else(|| Error::data("snapshot holds a plain field; use read_scalar".to_string()))?;
    let values = read_payload(r, header.grid.len() * lambda.m())?;
    KineticField::from_data(header.grid, lambda, values)
}

/// Writes a one-dimensional slice of a field as CSV with columns `x,value`.
///
/// `axis` is the varying axis; `index` fixes the other axis (must be 0 along
/// with `axis = 0` in one dimension). Floats are formatted with the shortest
/// representation that round-trips, so identical data produces identical
/// bytes.
pub fn write_csv_slice(
    field: &ScalarField,
    axis: usize,
    index: usize,
    w: &mut impl Write,
) -> Result<()> {
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(Error::domain(format!(
            "axis {axis} out of range for a {}-dimensional field",
            grid.dim()
        )));
    }
    let needs_index = grid.dim() == 2;
    if needs_index && index >= grid.n() {
        return Err(Error::domain(format!("index {index} out of range (n = {})", grid.n())));
    }
    if !needs_index && index != 0 {
        return Err(Error::domain("one-dimensional fields only have slice index 0".to_string()));
    }
    writeln!(w, "x,value")?;
    let h = grid.h();
    for i in 0..grid.n() {
        let flat = match (grid.dim(), axis) {
            (1, _) => i,
            (2, 0) => grid.ravel([i, index]),
            _ => grid.ravel([index, i]),
        };
        writeln!(w, "{},{}", i as f64 * h, field.data()[flat])?;
    }
    Ok(())
}
