//! Field serialization.
//!
//! A field is stored as a flat binary raster `<base>.bin` (row-major,
//! little-endian `f64` pairs re/im) next to a JSON sidecar `<base>.json`
//! carrying the grid parameters. Midline CSV exports and slice manifests
//! support plotting the propagation results.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec};

#[derive(Debug, Serialize, Deserialize)]
struct RasterSidecar {
    n_x: usize,
    extent: f64,
}

/// Write `<base>.bin` and `<base>.json` for a field.
pub fn write_field_raster(field: &ComplexField2D, base: &Path) -> Result<()> {
    let sidecar = RasterSidecar {
        n_x: field.grid().n(),
        extent: field.grid().extent(),
    };
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::InvalidArgument(format!("sidecar encode: {e}")))?;
    std::fs::write(base.with_extension("json"), json)?;

    let mut w = BufWriter::new(File::create(base.with_extension("bin"))?);
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field previously written by [`write_field_raster`].
pub fn read_field_raster(base: &Path) -> Result<ComplexField2D> {
    let json = std::fs::read_to_string(base.with_extension("json"))?;
    let sidecar: RasterSidecar = serde_json::from_str(&json)
        .map_err(|e| Error::InvalidArgument(format!("sidecar decode: {e}")))?;
    let grid = GridSpec::new(sidecar.n_x, sidecar.extent)?;

    let mut r = BufReader::new(File::open(base.with_extension("bin"))?);
    let mut buf = [0u8; 16];
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    ComplexField2D::from_values(&grid, values)
}

/// CSV of |f|² along the x-axis midline (y = 0), columns `x,intensity`.
pub fn write_midline_csv(field: &ComplexField2D, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x_lambda,intensity")?;
    let grid = field.grid();
    let iy = grid.n() / 2;
    for ix in 0..grid.n() {
        writeln!(w, "{},{}", grid.coord(ix), field.at(ix, iy).norm_sqr())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SliceManifestEntry {
    pub index: usize,
    pub z: f64,
    pub raster: String,
}

/// JSON manifest listing the z-positions of recorded propagation slices.
pub fn write_slice_manifest(path: &Path, entries: &[SliceManifestEntry]) -> Result<()> {
    let json = serde_json::to_string_pretty(entries)
        .map_err(|e| Error::InvalidArgument(format!("manifest encode: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_round_trip() {
        let grid = GridSpec::new(16, 2.0).unwrap();
        let f = ComplexField2D::from_fn(&grid, |x, y| Complex64::new(x, y * 0.5));
        let dir = std::env::temp_dir().join("slowlight_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let base = dir.join("field");
        write_field_raster(&f, &base).unwrap();
        let g = read_field_raster(&base).unwrap();
        assert_eq!(f, g);
    }
}
