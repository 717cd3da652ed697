//! Signal import/export.
//!
//! CSV rows are `index,re,im` with the flat node index. The binary layout is a
//! 16-byte little-endian header (magic `GABR`, `u32 n`, `u32 L`, `u32 rank`)
//! followed by interleaved `f64` real/imaginary parts. `rank` is 1 for grid
//! signals (`L^n` values) and 2 for time-frequency arrays (`L^n × L^n` values).
//! The grid period is not stored and must be supplied on read.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{GridSignal, PeriodicGrid};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"GABR";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(signal: &GridSignal, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "re", "im"])?;
    for (k, v) in signal.values().iter().enumerate() {
        w.write_record([k.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(grid: PeriodicGrid, reader: R) -> Result<GridSignal> {
    let mut r = csv::Reader::from_reader(reader);
    let mut values = vec![None; grid.len()];
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Format(format!("expected 3 columns, got {}", rec.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|_| Error::Format(format!("bad number {:?}", &rec[i])))
        };
        let k: usize = rec[0].trim().parse().map_err(|_| Error::Format(format!("bad index {:?}", &rec[0])))?;
        if k >= grid.len() {
            return Err(Error::Format(format!("index {k} out of range")));
        }
        values[k] = Some(Complex64::new(parse(1)?, parse(2)?));
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Format(format!("missing index {k}"))))
        .collect::<Result<Vec<_>>>()?;
    GridSignal::new(grid, values)
}

pub(crate) fn write_header<W: Write>(w: &mut W, grid: &PeriodicGrid, rank: u32) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&rank.to_le_bytes())?;
    Ok(())
}

pub(crate) fn read_header<R: Read>(r: &mut R, period: f64, rank: u32) -> Result<PeriodicGrid> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if head[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    let (n, l, got_rank) = (word(4), word(8), word(12));
    if got_rank != rank {
        return Err(Error::Format(format!("expected rank {rank}, found {got_rank}")));
    }
    PeriodicGrid::new(n as usize, period, l as usize)
}

pub(crate) fn write_values<W: Write>(w: &mut W, values: &[Complex64]) -> Result<()> {
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_values<R: Read>(r: &mut R, count: usize) -> Result<Vec<Complex64>> {
    let mut buf = vec![0u8; count * 16];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

pub fn write_binary<W: Write>(signal: &GridSignal, mut writer: W) -> Result<()> {
    write_header(&mut writer, signal.grid(), 1)?;
    write_values(&mut writer, signal.values())?;
    writer.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut reader: R, period: f64) -> Result<GridSignal> {
    let grid = read_header(&mut reader, period, 1)?;
    let values = read_values(&mut reader, grid.len())?;
    GridSignal::new(grid, values)
}
