//! Raw field files and CSV slices.
//!
//! Layout (little-endian): magic `TRIC` [0..4], version u16 [4..6], dim u16
//! [6..8], points-per-axis u32×3 [8..20], reserved zero u32 [20..24], period
//! f64 [24..32], then the f64 samples in row-major order. Unused axes store 1.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{SpatialField, TorusGrid};
use crate::error::{Result, TricomiError};

pub const FIELD_MAGIC: &[u8; 4] = b"TRIC";
pub const FIELD_VERSION: u16 = 1;

/// Writes a field file. The header stores a single period, so grids with
/// different periods per axis are rejected.
pub fn write_field(path: &Path, field: &SpatialField) -> Result<()> {
    let grid = &field.grid;
    let period = grid.period()[0];
    if grid.period().iter().any(|&l| l != period) {
        return Err(TricomiError::domain("field files require the same period on every axis"));
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(FIELD_MAGIC)?;
    out.write_all(&FIELD_VERSION.to_le_bytes())?;
    out.write_all(&(grid.dim() as u16).to_le_bytes())?;
    for j in 0..3 {
        let n = grid.points().get(j).copied().unwrap_or(1) as u32;
        out.write_all(&n.to_le_bytes())?;
    }
    out.write_all(&0u32.to_le_bytes())?;
    out.write_all(&period.to_le_bytes())?;
    for v in &field.values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpatialField> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 32 || &bytes[0..4] != FIELD_MAGIC {
        return Err(TricomiError::Parse(format!("{} is not a field file", path.display())));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u16_at(4);
    if version != FIELD_VERSION {
        return Err(TricomiError::Parse(format!("unsupported field version {version}")));
    }
    let dim = u16_at(6) as usize;
    if !(1..=3).contains(&dim) {
        return Err(TricomiError::Parse(format!("bad dimension {dim}")));
    }
    let points: Vec<usize> = (0..dim).map(|j| u32_at(8 + 4 * j) as usize).collect();
    let period = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let grid = TorusGrid::new(&points, &vec![period; dim])?;
    let body = &bytes[32..];
    if body.len() != 8 * grid.len() {
        return Err(TricomiError::Parse(format!(
            "expected {} samples, found {} bytes",
            grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SpatialField::new(grid, values)
}

/// CSV of coordinates and values: every sample for 1D/2D, the middle `x₃`
/// plane for 3D.
pub fn write_csv_slice(path: &Path, field: &SpatialField) -> Result<()> {
    let grid = &field.grid;
    let mut out = BufWriter::new(File::create(path)?);
    match grid.dim() {
        1 => writeln!(out, "x,value")?,
        _ => writeln!(out, "x,y,value")?,
    }
    let plane = if grid.dim() == 3 { grid.points()[2] } else { 1 };
    let mid = if grid.dim() == 3 { grid.points()[2] / 2 } else { 0 };
    for i in 0..grid.len() {
        if grid.dim() == 3 && i % plane != mid {
            continue;
        }
        let x = grid.coords(i);
        let v = field.values[i];
        match grid.dim() {
            1 => writeln!(out, "{:.17e},{:.17e}", x[0], v)?,
            _ => writeln!(out, "{:.17e},{:.17e},{:.17e}", x[0], x[1], v)?,
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("tricomi-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.tric");
        let grid = TorusGrid::cube(2, 8, 3.5).unwrap();
        let field = grid.sample(|x| x[0] * 2.0 - x[1]);
        write_field(&path, &field).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"TRIC");
        assert_eq!(bytes.len(), 32 + 8 * 64);
        assert_eq!(read_field(&path).unwrap(), field);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn anisotropic_period_is_rejected() {
        let grid = TorusGrid::new(&[8, 8], &[1.0, 2.0]).unwrap();
        let path = std::env::temp_dir().join("tricomi-aniso.tric");
        assert!(write_field(&path, &grid.zeros()).is_err());
    }
}
