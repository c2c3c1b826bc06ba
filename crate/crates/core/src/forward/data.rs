//! Near- and far-field records and their CSV form.
//!
//! Far field (`# farfield dim R`), one row per pair:
//! `kappa, d_1..d_dim, theta_1..theta_dim, re, im`.
//!
//! Near field (`# nearfield dim R`), one row per boundary point:
//! `kappa, d_1..d_dim, x_1..x_dim, re, im, re_neumann, im_neumann`.
//! Consecutive rows with equal (kappa, d) form one record.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPair {
    pub theta: Vec<f64>,
    pub d: Vec<f64>,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldRecord {
    pub kappa: f64,
    pub pairs: Vec<FarFieldPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearFieldRecord {
    pub kappa: f64,
    pub d: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub dirichlet: Vec<Complex64>,
    pub neumann: Vec<Complex64>,
}

impl NearFieldRecord {
    pub fn validate(&self, radius: f64) -> Result<()> {
        if self.points.len() != self.dirichlet.len() || self.points.len() != self.neumann.len() {
            return Err(Error::Shape("trace lengths differ from the number of boundary points".into()));
        }
        for p in &self.points {
            let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (r - radius).abs() > 1e-12 * radius.max(1.0) {
                return Err(Error::Domain(format!("boundary point at |x| = {r}, expected {radius}")));
            }
        }
        let needed = 8 * (self.kappa * radius).ceil() as usize;
        if self.points.len() < needed {
            return Err(Error::Domain(format!(
                "{} boundary points at κR = {}; at least {needed} required",
                self.points.len(),
                self.kappa * radius
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringDataset {
    FarField { dim: usize, radius: f64, records: Vec<FarFieldRecord> },
    NearField { dim: usize, radius: f64, records: Vec<NearFieldRecord> },
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ScatteringDataset {
    pub fn dim(&self) -> usize {
        match self {
            Self::FarField { dim, .. } | Self::NearField { dim, .. } => *dim,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            Self::FarField { radius, .. } | Self::NearField { radius, .. } => *radius,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self {
            Self::FarField { dim, radius, records } => {
                writeln!(w, "# farfield {dim} {radius}")?;
                for rec in records {
                    for p in &rec.pairs {
                        writeln!(w, "{}, {}, {}, {}, {}", rec.kappa, fmt_vec(&p.d), fmt_vec(&p.theta), p.value.re, p.value.im)?;
                    }
                }
            }
            Self::NearField { dim, radius, records } => {
                writeln!(w, "# nearfield {dim} {radius}")?;
                for rec in records {
                    for ((x, u), un) in rec.points.iter().zip(&rec.dirichlet).zip(&rec.neumann) {
                        writeln!(
                            w,
                            "{}, {}, {}, {}, {}, {}, {}",
                            rec.kappa,
                            fmt_vec(&rec.d),
                            fmt_vec(x),
                            u.re,
                            u.im,
                            un.re,
                            un.im
                        )?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty dataset file".into()))??;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "#" {
            return Err(Error::Parse(format!("bad dataset header: {header}")));
        }
        let dim: usize = h[2].parse().map_err(|_| Error::Parse(format!("bad dimension {}", h[2])))?;
        let radius: f64 = h[3].parse().map_err(|_| Error::Parse(format!("bad radius {}", h[3])))?;
        let rows = lines
            .enumerate()
            .filter_map(|(i, l)| match l {
                Ok(s) if s.trim().is_empty() => None,
                Ok(s) => Some(parse_row(&s).map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))),
                Err(e) => Some(Err(e.into())),
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        match h[1] {
            "farfield" => {
                let mut records: Vec<FarFieldRecord> = Vec::new();
                for row in rows {
                    if row.len() != 2 * dim + 3 {
                        return Err(Error::Parse(format!("far-field row needs {} columns", 2 * dim + 3)));
                    }
                    let pair = FarFieldPair {
                        d: row[1..1 + dim].to_vec(),
                        theta: row[1 + dim..1 + 2 * dim].to_vec(),
                        value: Complex64::new(row[1 + 2 * dim], row[2 + 2 * dim]),
                    };
                    match records.last_mut() {
                        Some(rec) if rec.kappa == row[0] => rec.pairs.push(pair),
                        _ => records.push(FarFieldRecord { kappa: row[0], pairs: vec![pair] }),
                    }
                }
                Ok(Self::FarField { dim, radius, records })
            }
            "nearfield" => {
                let mut records: Vec<NearFieldRecord> = Vec::new();
                for row in rows {
                    if row.len() != 2 * dim + 5 {
                        return Err(Error::Parse(format!("near-field row needs {} columns", 2 * dim + 5)));
                    }
                    let d = row[1..1 + dim].to_vec();
                    let x = row[1 + dim..1 + 2 * dim].to_vec();
                    let u = Complex64::new(row[1 + 2 * dim], row[2 + 2 * dim]);
                    let un = Complex64::new(row[3 + 2 * dim], row[4 + 2 * dim]);
                    match records.last_mut() {
                        Some(rec) if rec.kappa == row[0] && rec.d == d => {
                            rec.points.push(x);
                            rec.dirichlet.push(u);
                            rec.neumann.push(un);
                        }
                        _ => records.push(NearFieldRecord { kappa: row[0], d, points: vec![x], dirichlet: vec![u], neumann: vec![un] }),
                    }
                }
                Ok(Self::NearField { dim, radius, records })
            }
            other => Err(Error::Parse(format!("unknown dataset kind {other}"))),
        }
    }
}

fn parse_row(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{}'", c.trim()))))
        .collect()
}
