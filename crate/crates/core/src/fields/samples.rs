use super::{inverse_lattice_transform, ClassParams, Grid, ScalarField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::io::{BufRead, Write};

/// Which frequency ball the samples are allowed to fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleBound {
    /// |ξ| ≤ 2κ
    Scalar,
    /// |ξ| ≤ √2 κ
    Magnetic,
}

impl SampleBound {
    pub fn factor(self) -> f64 {
        match self {
            SampleBound::Scalar => 2.0,
            SampleBound::Magnetic => std::f64::consts::SQRT_2,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            SampleBound::Scalar => "scalar",
            SampleBound::Magnetic => "magnetic",
        }
    }
}

/// One estimate of a transform value at ξ, with the frequency and the
/// direction-pair index it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSample {
    pub xi: Vec<f64>,
    pub value: Complex64,
    pub kappa: f64,
    pub pair_id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSampleSet {
    dim: usize,
    bound: SampleBound,
    entries: Vec<FourierSample>,
}

impl FourierSampleSet {
    pub fn new(dim: usize, bound: SampleBound) -> Self {
        Self { dim, bound, entries: Vec::new() }
    }

    pub fn push(&mut self, sample: FourierSample) -> Result<()> {
        if sample.xi.len() != self.dim {
            return Err(Error::Shape(format!("ξ of length {} in a {}D sample set", sample.xi.len(), self.dim)));
        }
        let norm = sample.xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let limit = self.bound.factor() * sample.kappa;
        if !(sample.kappa > 0.0) || norm > limit * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "|ξ| = {norm} exceeds {} κ = {limit}",
                self.bound.factor()
            )));
        }
        self.entries.push(sample);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> SampleBound {
        self.bound
    }

    pub fn entries(&self) -> &[FourierSample] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV: `# fourier-samples dim bound`, then `xi..., re, im, kappa, pair_id`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# fourier-samples {} {}", self.dim, self.bound.tag())?;
        let axes = ["xi_x", "xi_y", "xi_z"];
        writeln!(w, "{}, re, im, kappa, pair_id", axes[..self.dim].join(", "))?;
        for e in &self.entries {
            let xi: Vec<String> = e.xi.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}, {}, {}, {}, {}", xi.join(", "), e.value.re, e.value.im, e.kappa, e.pair_id)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty sample file".into()))??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "#" || parts[1] != "fourier-samples" {
            return Err(Error::Parse(format!("bad sample header: {header}")));
        }
        let dim: usize = parts[2].parse().map_err(|_| Error::Parse(format!("bad dimension {}", parts[2])))?;
        let bound = match parts[3] {
            "scalar" => SampleBound::Scalar,
            "magnetic" => SampleBound::Magnetic,
            other => return Err(Error::Parse(format!("unknown sample bound {other}"))),
        };
        let mut set = Self::new(dim, bound);
        for (lineno, line) in lines.enumerate().skip(1) {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != dim + 4 {
                return Err(Error::Parse(format!("line {}: expected {} columns", lineno + 2, dim + 4)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
            let xi = cols[..dim].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            let value = Complex64::new(num(cols[dim])?, num(cols[dim + 1])?);
            let kappa = num(cols[dim + 2])?;
            let pair_id = cols[dim + 3].parse().map_err(|_| Error::Parse(format!("bad pair id {}", cols[dim + 3])))?;
            set.push(FourierSample { xi, value, kappa, pair_id })?;
        }
        Ok(set)
    }
}

/// How well binned samples fill the lattice ball |ξ| ≤ K_c.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub cutoff: f64,
    pub nodes_in_ball: usize,
    pub nodes_filled: usize,
    /// Shell s holds nodes with s·Δξ ≤ |ξ| < (s+1)·Δξ.
    pub uncovered_shells: Vec<usize>,
    pub dropped_samples: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.nodes_in_ball == 0 {
            0.0
        } else {
            self.nodes_filled as f64 / self.nodes_in_ball as f64
        }
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cutoff {}", self.cutoff)?;
        writeln!(f, "nodes in ball {}", self.nodes_in_ball)?;
        writeln!(f, "nodes filled {} ({:.2}%)", self.nodes_filled, 100.0 * self.fraction())?;
        writeln!(f, "samples off lattice or beyond cutoff {}", self.dropped_samples)?;
        write!(f, "uncovered shells {:?}", self.uncovered_shells)
    }
}

/// Bins samples to the nearest lattice node, keeps those from the largest κ
/// at each node and averages them in entry order. Returns the spectrum in
/// transform ordering plus a fill mask.
pub(crate) fn bin_samples(
    samples: &FourierSampleSet,
    cutoff: f64,
    grid: &Grid,
) -> Result<(Vec<Complex64>, Vec<bool>, Coverage)> {
    if samples.dim() != grid.dim() {
        return Err(Error::Shape(format!("{}D samples on a {}D grid", samples.dim(), grid.dim())));
    }
    let dxi = grid.dual_spacing();
    let mut landed: Vec<Option<usize>> = Vec::with_capacity(samples.len());
    let mut best_kappa = vec![0.0f64; grid.len()];
    let mut dropped = 0;
    'samples: for s in samples.entries() {
        let mut idx = [0usize; 3];
        let mut node_norm2 = 0.0;
        for a in 0..grid.dim() {
            let k = (s.xi[a] / dxi).round() as i64;
            match grid.unsigned_index(k) {
                Some(m) => idx[a] = m,
                None => {
                    dropped += 1;
                    landed.push(None);
                    continue 'samples;
                }
            }
            node_norm2 += (k as f64 * dxi).powi(2);
        }
        if node_norm2.sqrt() > cutoff {
            dropped += 1;
            landed.push(None);
            continue;
        }
        let flat = grid.flat(&idx[..grid.dim()]);
        best_kappa[flat] = best_kappa[flat].max(s.kappa);
        landed.push(Some(flat));
    }
    // only the highest-frequency samples at a node are kept
    let mut sum = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut count = vec![0usize; grid.len()];
    for (s, node) in samples.entries().iter().zip(&landed) {
        if let Some(flat) = *node {
            if s.kappa >= best_kappa[flat] * (1.0 - 1e-12) {
                sum[flat] += s.value;
                count[flat] += 1;
            }
        }
    }
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut filled = vec![false; grid.len()];
    for i in 0..grid.len() {
        if count[i] > 0 {
            spec[i] = sum[i] / count[i] as f64;
            filled[i] = true;
        }
    }
    // a lone node whose mirror is missing takes the conjugate value there
    for i in 0..grid.len() {
        let m = grid.mirror(i);
        if filled[i] && !filled[m] && count[m] == 0 {
            let xi = grid.wavevector(m);
            if (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt() <= cutoff {
                spec[m] = spec[i].conj();
                filled[m] = true;
            }
        }
    }
    let shells = (cutoff / dxi).floor() as usize + 1;
    let mut shell_hit = vec![false; shells];
    let mut shell_seen = vec![false; shells];
    let mut in_ball = 0;
    let mut n_filled = 0;
    for i in 0..grid.len() {
        let xi = grid.wavevector(i);
        let norm = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        if norm > cutoff {
            continue;
        }
        in_ball += 1;
        let shell = ((norm / dxi).floor() as usize).min(shells - 1);
        shell_seen[shell] = true;
        if filled[i] {
            n_filled += 1;
            shell_hit[shell] = true;
        }
    }
    let uncovered_shells =
        (0..shells).filter(|&s| shell_seen[s] && !shell_hit[s]).collect();
    let coverage = Coverage { cutoff, nodes_in_ball: in_ball, nodes_filled: n_filled, uncovered_shells, dropped_samples: dropped };
    Ok((spec, filled, coverage))
}

/// Low-pass inversion of scattered transform samples onto the grid.
pub fn inverse_bandlimited(
    samples: &FourierSampleSet,
    cutoff: f64,
    grid: &Grid,
    class: ClassParams,
) -> Result<(ScalarField, Coverage)> {
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
    }
    let (spec, _, coverage) = bin_samples(samples, cutoff, grid)?;
    if coverage.nodes_filled == 0 {
        return Err(Error::Coverage(format!(
            "no samples landed inside |ξ| ≤ {cutoff}; uncovered shells {:?}",
            coverage.uncovered_shells
        )));
    }
    let values = inverse_lattice_transform(grid, &spec).into_iter().map(|v| v.re).collect();
    Ok((ScalarField::masked(*grid, values, class)?, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{fourier_forward, l2_error};

    #[test]
    fn bound_is_enforced() {
        let mut set = FourierSampleSet::new(2, SampleBound::Scalar);
        let ok = FourierSample { xi: vec![3.0, 4.0], value: Complex64::new(1.0, 0.0), kappa: 2.5, pair_id: 0 };
        assert!(set.push(ok).is_ok());
        let bad = FourierSample { xi: vec![3.0, 4.1], value: Complex64::new(1.0, 0.0), kappa: 2.5, pair_id: 1 };
        assert!(set.push(bad).is_err());
        let mut mag = FourierSampleSet::new(2, SampleBound::Magnetic);
        let over = FourierSample { xi: vec![3.0, 4.0], value: Complex64::new(1.0, 0.0), kappa: 2.5, pair_id: 0 };
        assert!(mag.push(over).is_err());
        for e in set.entries() {
            let n = e.xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(n <= 2.0 * e.kappa * (1.0 + 1e-12));
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut set = FourierSampleSet::new(3, SampleBound::Magnetic);
        set.push(FourierSample { xi: vec![0.1, -0.2, 1.0 / 3.0], value: Complex64::new(1e-17, -2.5), kappa: 1.0, pair_id: 7 })
            .unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = FourierSampleSet::read_csv(&buf[..]).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn zero_samples_give_zero_field() {
        let grid = Grid::new(2, 1.0, 16).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.9).unwrap();
        let mut set = FourierSampleSet::new(2, SampleBound::Scalar);
        for k in -3..=3 {
            let xi = vec![k as f64 * grid.dual_spacing(), 0.0];
            set.push(FourierSample { xi, value: Complex64::new(0.0, 0.0), kappa: 20.0, pair_id: 0 }).unwrap();
        }
        let (f, cov) = inverse_bandlimited(&set, 20.0, &grid, class).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
        assert!(cov.nodes_filled >= 7);
        let empty = FourierSampleSet::new(2, SampleBound::Scalar);
        assert!(matches!(inverse_bandlimited(&empty, 5.0, &grid, class), Err(Error::Coverage(_))));
    }

    #[test]
    fn band_limited_round_trip() {
        let grid = Grid::new(2, 1.0, 32).unwrap();
        let class = ClassParams::new(1.0, 10.0, 1.0).unwrap();
        // a trigonometric polynomial on the box, cut to the support ball afterwards
        let dxi = grid.dual_spacing();
        let modes = [(1i64, 2i64, 0.7), (-3, 1, 0.4), (0, 0, 0.2), (2, -2, 0.3)];
        let f = |x: &[f64]| -> f64 {
            modes.iter().map(|&(a, b, c)| c * (dxi * (a as f64 * (x[0] + 1.0) + b as f64 * (x[1] + 1.0))).cos()).sum()
        };
        let full_class = ClassParams::new(1.0, 10.0, 2.0f64.sqrt()).unwrap();
        let big = Grid::new(2, 1.0, 32).unwrap();
        let values: Vec<f64> = (0..big.len()).map(|i| f(&big.point(i)[..2])).collect();
        let field = ScalarField { grid: big, values, class: full_class };
        let mut set = FourierSampleSet::new(2, SampleBound::Scalar);
        for i in 0..grid.len() {
            let xi = grid.wavevector(i);
            if xi[0].hypot(xi[1]) <= 4.0 * dxi {
                let v = fourier_forward(&field, &xi[..2]);
                set.push(FourierSample { xi: xi[..2].to_vec(), value: v, kappa: 100.0, pair_id: i }).unwrap();
            }
        }
        let (rec, _) = inverse_bandlimited(&set, 4.0 * dxi, &grid, class).unwrap();
        let truth = ScalarField::masked(grid, field.values.clone(), class).unwrap();
        let err = l2_error(&truth, &rec).unwrap();
        let norm = l2_error(&truth, &ScalarField::zeros(grid, class).unwrap()).unwrap();
        assert!(err <= 1e-8 * norm, "{err} vs {norm}");
    }
}
