//! Field file format.
//!
//! ```text
//! dim N halfWidth R s Q
//! v_0 v_1 ... v_{N^dim - 1}
//! ```
//! Values follow the grid's row-major order (axis 0 slowest, last axis
//! fastest), one per line. Numbers are written in shortest round-trip form so
//! reading a written file reproduces the field bit for bit.

use super::{ClassParams, Grid, ScalarField};
use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_field<W: Write>(field: &ScalarField, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    let g = field.grid();
    let c = field.class();
    writeln!(w, "{} {} {} {} {} {}", g.dim(), g.points_per_axis(), g.half_width(), c.r, c.s, c.q)?;
    for v in field.values() {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(r: R) -> Result<ScalarField> {
    let mut reader = BufReader::new(r);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 {
        return Err(Error::Parse(format!("field header needs 6 entries, got '{}'", header.trim())));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad integer '{s}'")));
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
    let grid = Grid::new(int(h[0])?, num(h[2])?, int(h[1])?)?;
    let class = ClassParams::new(num(h[4])?, num(h[5])?, num(h[3])?)?;
    let mut rest = String::new();
    reader.read_to_string(&mut rest)?;
    let values = rest.split_whitespace().map(num).collect::<Result<Vec<f64>>>()?;
    ScalarField::new(grid, values, class)
}

pub fn save_field(field: &ScalarField, path: &Path) -> Result<()> {
    write_field(field, File::create(path)?)
}

pub fn load_field(path: &Path) -> Result<ScalarField> {
    read_field(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let grid = Grid::new(3, 0.6, 8).unwrap();
        let class = ClassParams::new(1.5, 2.0, 0.55).unwrap();
        let f = ScalarField::from_fn(grid, class, |x| (x[0] * 7.1).sin() / 3.0 + x[1] * x[2] * 1e-9).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_field("2 4 1.0\n".as_bytes()).is_err());
        assert!(read_field("2 4 1.0 0.5 1 1\n0 0 0\n".as_bytes()).is_err());
    }
}
