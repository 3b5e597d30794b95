//! On-disk formats: binary field dumps and CSV series.
//!
//! Field dump layout, all little-endian:
//!
//! ```text
//! offset  size  content
//! 0       5     magic "FLD2D"
//! 5       1     format version (1)
//! 6       4     nx (u32)
//! 10      4     ny (u32)
//! 14      8     lx (f64)
//! 22      8     ly (f64)
//! 30      8*n   cell values, row-major (x fastest)
//! ```
//!
//! CSV outputs use the platform-independent `\n` and Rust's shortest
//! round-trip float formatting, so identical data produces identical
//! bytes on every machine.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::vec2::Vec2;

const MAGIC: &[u8; 5] = b"FLD2D";
const VERSION: u8 = 1;

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), message: message.into() }
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    let g = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&(g.nx() as u32).to_le_bytes())?;
    w.write_all(&(g.ny() as u32).to_le_bytes())?;
    w.write_all(&g.lx().to_le_bytes())?;
    w.write_all(&g.ly().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let mut buf = Vec::new();
    File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() < 30 {
        return Err(format_err(path, "file shorter than the header"));
    }
    if &buf[0..5] != MAGIC {
        return Err(format_err(path, "bad magic, not a field dump"));
    }
    if buf[5] != VERSION {
        return Err(format_err(path, format!("unsupported format version {}", buf[5])));
    }
    let nx = u32::from_le_bytes(buf[6..10].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(buf[10..14].try_into().unwrap()) as usize;
    let lx = f64::from_le_bytes(buf[14..22].try_into().unwrap());
    let ly = f64::from_le_bytes(buf[22..30].try_into().unwrap());
    let grid = Grid2D::new(nx, ny, lx, ly)
        .map_err(|e| format_err(path, format!("invalid grid header: {e}")))?;
    let want = 30 + 8 * grid.n_cells();
    if buf.len() != want {
        return Err(format_err(
            path,
            format!("expected {want} bytes for a {nx}x{ny} field, found {}", buf.len()),
        ));
    }
    let values = buf[30..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(grid, values)
}

/// `step,time,E` series for one run.
pub fn write_error_series(path: &Path, series: &[f64], dt: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"step,time,E\n")?;
    for (step, e) in series.iter().enumerate() {
        writeln!(w, "{},{},{}", step, step as f64 * dt, e)?;
    }
    w.flush()?;
    Ok(())
}

/// `step,agent,x,y` rows for the recorded trajectory frames.
pub fn write_trajectory(path: &Path, frames: &[(usize, Vec<Vec2>)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"step,agent,x,y\n")?;
    for (step, positions) in frames {
        for (agent, p) in positions.iter().enumerate() {
            writeln!(w, "{},{},{},{}", step, agent, p.x, p.y)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One summary row per (method, step).
pub struct SummaryRow<'a> {
    pub step: usize,
    pub time: f64,
    pub method: &'a str,
    pub mean_e: f64,
    pub std_e: f64,
}

pub fn write_summary<'a>(path: &Path, rows: impl IntoIterator<Item = SummaryRow<'a>>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"step,time,method,mean_E,std_E\n")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.step, r.time, r.method, r.mean_e, r.std_e)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn field_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::new(8, 16, 1.0, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x * 17.3).sin() * 1e-300 + y - 0.77);
        let path = dir.path().join("f.fld");
        write_field(&path, &f).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.grid(), &g);
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_dumps_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::unit(8, 8).unwrap();
        let f = ScalarField::constant(g, 1.0);
        let path = dir.path().join("f.fld");
        write_field(&path, &f).unwrap();
        let good = fs::read(&path).unwrap();

        let truncated = dir.path().join("t.fld");
        fs::write(&truncated, &good[..good.len() - 4]).unwrap();
        assert!(read_field(&truncated).is_err());

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        let p = dir.path().join("m.fld");
        fs::write(&p, &bad_magic).unwrap();
        assert!(read_field(&p).is_err());

        let mut bad_version = good.clone();
        bad_version[5] = 9;
        let p = dir.path().join("v.fld");
        fs::write(&p, &bad_version).unwrap();
        assert!(read_field(&p).is_err());

        let mut odd_dims = good;
        odd_dims[6..10].copy_from_slice(&7u32.to_le_bytes());
        let p = dir.path().join("d.fld");
        fs::write(&p, &odd_dims).unwrap();
        assert!(read_field(&p).is_err());
    }

    #[test]
    fn csv_layouts_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let ep = dir.path().join("error.csv");
        write_error_series(&ep, &[1.0, 0.5], 0.05).unwrap();
        assert_eq!(fs::read_to_string(&ep).unwrap(), "step,time,E\n0,0,1\n1,0.05,0.5\n");

        let tp = dir.path().join("traj.csv");
        let frames = vec![(0usize, vec![Vec2::new(0.25, 0.5)]), (2, vec![Vec2::new(0.3, 0.625)])];
        write_trajectory(&tp, &frames).unwrap();
        assert_eq!(
            fs::read_to_string(&tp).unwrap(),
            "step,agent,x,y\n0,0,0.25,0.5\n2,0,0.3,0.625\n"
        );
    }
}
