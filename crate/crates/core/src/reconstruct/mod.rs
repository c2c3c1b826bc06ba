//! Fourier-domain estimators: scalar recovery from far- or near-field data,
//! and magnetic plus electric recovery from 3D far-field data.

mod magnetic;
mod near_field;

pub use magnetic::{magnetic_pairs_for_xi, recover_electric, recover_magnetic};
pub use near_field::{boundary_weight, near_field_fourier_estimate};

use crate::error::{Error, Result};
use crate::fields::{inverse_bandlimited, ClassParams, Coverage, FourierSample, FourierSampleSet, Grid, SampleBound, ScalarField};
use crate::forward::FarFieldRecord;
use std::f64::consts::PI;

/// Fraction of lattice nodes in the reconstruction ball that must carry data.
pub const DEFAULT_MIN_COVERAGE: f64 = 0.9;

/// Observation/incidence directions with κ(θ − d) = ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionPair {
    pub theta: Vec<f64>,
    pub d: Vec<f64>,
    pub kappa: f64,
}

impl DirectionPair {
    pub fn xi(&self) -> Vec<f64> {
        self.theta.iter().zip(&self.d).map(|(t, d)| self.kappa * (t - d)).collect()
    }
}

/// Two incident directions at one wavenumber for the near-field estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidentPair {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub kappa: f64,
    /// Require d1·d2 ≤ 0, as in the magnetic identity.
    pub angle_constraint: bool,
}

impl IncidentPair {
    pub fn new(d1: Vec<f64>, d2: Vec<f64>, kappa: f64, angle_constraint: bool) -> Result<Self> {
        if d1.len() != d2.len() {
            return Err(Error::Shape("incident directions differ in dimension".into()));
        }
        for d in [&d1, &d2] {
            let n = norm(d);
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("incident direction has norm {n}")));
            }
        }
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
        }
        if angle_constraint && dot(&d1, &d2) > 1e-12 {
            return Err(Error::Domain("incident directions must be at least a right angle apart".into()));
        }
        Ok(Self { d1, d2, kappa, angle_constraint })
    }

    /// −κ(d1 + d2), the frequency the estimator targets.
    pub fn xi(&self) -> Vec<f64> {
        self.d1.iter().zip(&self.d2).map(|(a, b)| -self.kappa * (a + b)).collect()
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Unit e along ξ (first axis when ξ = 0) plus an orthonormal transverse
/// frame: one vector in 2D, two in 3D. Deterministic in ξ.
pub(crate) fn frame(xi: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = xi.len();
    let n = norm(xi);
    let e: Vec<f64> = if n == 0.0 {
        (0..dim).map(|a| if a == 0 { 1.0 } else { 0.0 }).collect()
    } else {
        xi.iter().map(|v| v / n).collect()
    };
    if dim == 2 {
        return (e.clone(), vec![vec![-e[1], e[0]]]);
    }
    // cross with the axis least aligned with e
    let mut axis = 0;
    for a in 1..3 {
        if e[a].abs() < e[axis].abs() {
            axis = a;
        }
    }
    let mut unit = [0.0; 3];
    unit[axis] = 1.0;
    let c = cross(&e, &unit);
    let cn = norm(&c);
    let v = vec![c[0] / cn, c[1] / cn, c[2] / cn];
    let w = cross(&e, &v).to_vec();
    (e, vec![v, w])
}

/// θ = t e + √(1 − t²) v, d = −t e + √(1 − t²) v with t = |ξ|/(2κ).
pub fn direction_pair_for_xi(xi: &[f64], kappa: f64) -> Result<DirectionPair> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
    }
    if xi.len() != 2 && xi.len() != 3 {
        return Err(Error::Shape(format!("ξ must have 2 or 3 components, got {}", xi.len())));
    }
    let n = norm(xi);
    if n > 2.0 * kappa * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|ξ| = {n} exceeds 2κ = {}", 2.0 * kappa)));
    }
    let (e, tr) = frame(xi);
    Ok(pair_from_frame(&e, &tr[0], (n / (2.0 * kappa)).min(1.0), kappa))
}

pub(crate) fn pair_from_frame(e: &[f64], v: &[f64], t: f64, kappa: f64) -> DirectionPair {
    let s = (1.0 - t * t).max(0.0).sqrt();
    let theta: Vec<f64> = e.iter().zip(v).map(|(a, b)| t * a + s * b).collect();
    let d: Vec<f64> = e.iter().zip(v).map(|(a, b)| -t * a + s * b).collect();
    DirectionPair { theta: normalized(theta), d: normalized(d), kappa }
}

fn normalized(x: Vec<f64>) -> Vec<f64> {
    let n = norm(&x);
    x.into_iter().map(|v| v / n).collect()
}

/// One wavevector per ± pair of dual-lattice nodes in |ξ| ≤ cutoff
/// (ξ = 0 included), in flat-index order.
pub fn lattice_targets(grid: &Grid, cutoff: f64) -> Vec<Vec<f64>> {
    (0..grid.len())
        .filter(|&i| i <= grid.mirror(i))
        .map(|i| grid.wavevector(i)[..grid.dim()].to_vec())
        .filter(|xi| norm(xi) <= cutoff)
        .collect()
}

/// Turns far-field records into transform samples at ξ = κ(θ − d): 4π A∞ in
/// 3D, A∞ in 2D. Where several wavenumbers reach one lattice node, binning
/// keeps the largest.
pub fn assemble_far_field_samples(records: &[FarFieldRecord], dim: usize) -> Result<FourierSampleSet> {
    if dim != 2 && dim != 3 {
        return Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}")));
    }
    let scale = if dim == 3 { 4.0 * PI } else { 1.0 };
    let mut set = FourierSampleSet::new(dim, SampleBound::Scalar);
    let mut id = 0;
    for rec in records {
        for p in &rec.pairs {
            if p.theta.len() != dim || p.d.len() != dim {
                return Err(Error::Shape("direction dimension differs from the dataset dimension".into()));
            }
            let xi = p.theta.iter().zip(&p.d).map(|(t, d)| rec.kappa * (t - d)).collect();
            set.push(FourierSample { xi, value: p.value * scale, kappa: rec.kappa, pair_id: id })?;
            id += 1;
        }
    }
    Ok(set)
}

/// Band-limited inversion at cutoff 2K, refusing when fewer than
/// `min_coverage` of the lattice nodes in the ball carry samples.
pub fn reconstruct_potential(
    samples: &FourierSampleSet,
    k: f64,
    grid: &Grid,
    class: ClassParams,
    min_coverage: f64,
) -> Result<(ScalarField, Coverage)> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("band limit must be positive, got {k}")));
    }
    if samples.is_empty() {
        return Err(Error::Coverage("no samples".into()));
    }
    let (field, coverage) = inverse_bandlimited(samples, 2.0 * k, grid, class)?;
    if coverage.fraction() < min_coverage {
        return Err(Error::Coverage(format!(
            "{} of {} nodes filled (need {:.0}%); uncovered shells {:?}",
            coverage.nodes_filled,
            coverage.nodes_in_ball,
            100.0 * min_coverage,
            coverage.uncovered_shells
        )));
    }
    Ok((field, coverage))
}
