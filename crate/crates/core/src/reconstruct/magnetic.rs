//! Magnetic recovery from the leading far-field term
//! A∞(κ, θ, d) ≈ −2κ d·b̂(ξ) − (|b|² + V)^(ξ), ξ = κ(θ − d).

use super::{dot, frame, pair_from_frame, reconstruct_potential, DirectionPair};
use crate::error::{Error, Result};
use crate::fields::{
    fourier_forward_values, inverse_lattice_transform, project_spectrum, ClassParams, Coverage, FourierSample, FourierSampleSet,
    Grid, SampleBound, ScalarField, VectorField,
};
use crate::forward::FarFieldRecord;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Four pairs reaching ξ whose incident directions have transverse parts
/// v, w, −v, −w (v, w orthonormal and orthogonal to ξ).
pub fn magnetic_pairs_for_xi(xi: &[f64], kappa: f64) -> Result<[DirectionPair; 4]> {
    if xi.len() != 3 {
        return Err(Error::Domain("magnetic pairs need a 3D frequency".into()));
    }
    let base = super::direction_pair_for_xi(xi, kappa)?;
    let t = super::norm(xi) / (2.0 * kappa);
    let (e, tr) = frame(xi);
    let neg = |x: &[f64]| x.iter().map(|v| -v).collect::<Vec<f64>>();
    let (v, w) = (&tr[0], &tr[1]);
    Ok([
        base,
        pair_from_frame(&e, w, t, kappa),
        pair_from_frame(&e, &neg(v), t, kappa),
        pair_from_frame(&e, &neg(w), t, kappa),
    ])
}

fn svd_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

fn lstsq(m: &DMatrix<f64>, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let svd = m.clone().svd(true, true);
    let re = DVector::from_iterator(rhs.len(), rhs.iter().map(|v| v.re));
    let im = DVector::from_iterator(rhs.len(), rhs.iter().map(|v| v.im));
    let xr = svd.solve(&re, 1e-14).map_err(|e| Error::Conditioning(e.to_string()))?;
    let xi = svd.solve(&im, 1e-14).map_err(|e| Error::Conditioning(e.to_string()))?;
    Ok(xr.iter().zip(xi.iter()).map(|(a, b)| Complex64::new(*a, *b)).collect())
}

/// Recovers a divergence-free b from 3D far-field data in the magnetic
/// convention.
///
/// Pairs are binned to dual-lattice nodes in |ξ| ≤ cutoff (largest κ per
/// node). At each node the transverse part of b̂ and the scalar term are
/// fitted by least squares to A = −2κ d·b̂ − q̂; with only two pairs the
/// scalar term is dropped. Missing mirror nodes take conjugates, the
/// spectrum is projected onto ξ·b̂ = 0 and inverted.
pub fn recover_magnetic(records: &[FarFieldRecord], grid: &Grid, class: ClassParams, cutoff: f64) -> Result<(VectorField, Coverage)> {
    if grid.dim() != 3 {
        return Err(Error::Domain("magnetic recovery needs a 3D grid".into()));
    }
    let dxi = grid.dual_spacing();
    let mut best = vec![0.0f64; grid.len()];
    let mut landed = Vec::new();
    let mut dropped = 0;
    for rec in records {
        for p in &rec.pairs {
            if p.theta.len() != 3 || p.d.len() != 3 {
                return Err(Error::Shape("magnetic data must be 3D".into()));
            }
            let mut idx = [0usize; 3];
            let mut ok = true;
            let mut n2 = 0.0;
            for a in 0..3 {
                let k = (rec.kappa * (p.theta[a] - p.d[a]) / dxi).round() as i64;
                match grid.unsigned_index(k) {
                    Some(m) => idx[a] = m,
                    None => ok = false,
                }
                n2 += (k as f64 * dxi).powi(2);
            }
            if !ok || n2.sqrt() > cutoff {
                dropped += 1;
                continue;
            }
            let flat = grid.flat(&idx);
            best[flat] = best[flat].max(rec.kappa);
            landed.push((flat, rec.kappa, p));
        }
    }
    let mut groups: Vec<Vec<(f64, &crate::forward::FarFieldPair)>> = vec![Vec::new(); grid.len()];
    for (flat, kappa, p) in landed {
        if kappa >= best[flat] * (1.0 - 1e-12) {
            groups[flat].push((kappa, p));
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut spec = vec![vec![zero; grid.len()]; 3];
    let mut filled = vec![false; grid.len()];
    for (flat, group) in groups.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let node = grid.wavevector(flat);
        let (_, tr) = frame(&node);
        let n = group.len();
        let trans = DMatrix::from_fn(n, 2, |j, c| dot(&group[j].1.d, &tr[c]));
        let (smin, smax) = if n >= 2 { svd_extremes(&trans) } else { (0.0, 0.0) };
        if n < 2 || smax < 1e-8 || smin < 1e-6 * smax {
            return Err(Error::Conditioning(format!(
                "transverse incident components at ξ = {:?} do not span the plane orthogonal to ξ",
                node
            )));
        }
        let rhs: Vec<Complex64> = group.iter().map(|(_, p)| p.value).collect();
        let full = DMatrix::from_fn(n, 3, |j, c| if c < 2 { -2.0 * group[j].0 * trans[(j, c)] } else { -1.0 });
        let beta = if n >= 3 && {
            let (a, b) = svd_extremes(&full);
            a > 1e-10 * b
        } {
            lstsq(&full, &rhs)?
        } else {
            lstsq(&full.columns(0, 2).into_owned(), &rhs)?
        };
        for a in 0..3 {
            spec[a][flat] = beta[0] * tr[0][a] + beta[1] * tr[1][a];
        }
        filled[flat] = true;
    }
    for i in 0..grid.len() {
        let m = grid.mirror(i);
        if filled[i] && !filled[m] {
            for c in spec.iter_mut() {
                c[m] = c[i].conj();
            }
            filled[m] = true;
        }
    }
    let mut in_ball = 0;
    let mut n_filled = 0;
    let shells = (cutoff / dxi).floor() as usize + 1;
    let mut seen = vec![false; shells];
    let mut hit = vec![false; shells];
    for i in 0..grid.len() {
        let xi = grid.wavevector(i);
        let r = super::norm(&xi);
        if r <= cutoff {
            in_ball += 1;
            let s = ((r / dxi).floor() as usize).min(shells - 1);
            seen[s] = true;
            if filled[i] {
                n_filled += 1;
                hit[s] = true;
            }
        }
    }
    if n_filled == 0 {
        return Err(Error::Coverage(format!("no far-field pairs land inside |ξ| ≤ {cutoff}")));
    }
    project_spectrum(grid, &mut spec);
    let comps: Vec<Vec<f64>> = spec.iter().map(|c| inverse_lattice_transform(grid, c).into_iter().map(|v| v.re).collect()).collect();
    let [x, y, z]: [Vec<f64>; 3] = comps.try_into().map_err(|_| Error::Shape("three components expected".into()))?;
    let coverage = Coverage {
        cutoff,
        nodes_in_ball: in_ball,
        nodes_filled: n_filled,
        uncovered_shells: (0..shells).filter(|&s| seen[s] && !hit[s]).collect(),
        dropped_samples: dropped,
    };
    Ok((VectorField::new(*grid, [x, y, z], class)?, coverage))
}

/// Recovers V once b is known: the magnetic leading term −2κ d·b̂_rec is
/// removed from each far-field value, the remainder is read as −(|b|² + V)^,
/// the transform of |b_rec|² is subtracted and the result inverted at 2K.
pub fn recover_electric(
    records: &[FarFieldRecord],
    b: &VectorField,
    grid: &Grid,
    class: ClassParams,
    k: f64,
    min_coverage: f64,
) -> Result<(ScalarField, Coverage)> {
    b.grid().check_same(grid)?;
    let b2 = b.squared_magnitude();
    let b_is_zero = b.components().iter().all(|c| c.iter().all(|v| *v == 0.0));
    let mut set = FourierSampleSet::new(3, SampleBound::Scalar);
    let mut id = 0;
    for rec in records {
        for p in &rec.pairs {
            let xi: Vec<f64> = p.theta.iter().zip(&p.d).map(|(t, d)| rec.kappa * (t - d)).collect();
            let mut value = -p.value;
            if !b_is_zero {
                let mut db = Complex64::new(0.0, 0.0);
                for a in 0..3 {
                    db += fourier_forward_values(grid, &b.components()[a], &xi) * p.d[a];
                }
                value -= 2.0 * rec.kappa * db;
                value -= fourier_forward_values(grid, &b2, &xi);
            }
            set.push(FourierSample { xi, value, kappa: rec.kappa, pair_id: id })?;
            id += 1;
        }
    }
    reconstruct_potential(&set, k, grid, class, min_coverage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::norm;

    #[test]
    fn four_pairs_share_xi() {
        let xi = [3.0, -1.0, 2.0];
        let pairs = magnetic_pairs_for_xi(&xi, 4.0).unwrap();
        for p in &pairs {
            for (a, b) in p.xi().iter().zip(&xi) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // transverse parts are ±v, ±w
        let e: Vec<f64> = xi.iter().map(|v| v / norm(&xi)).collect();
        let tv: Vec<Vec<f64>> = pairs.iter().map(|p| {
            let de = dot(&p.d, &e);
            p.d.iter().zip(&e).map(|(d, e)| d - de * e).collect()
        }).collect();
        assert!(dot(&tv[0], &tv[1]).abs() < 1e-12);
        assert!((dot(&tv[0], &tv[2]) + dot(&tv[0], &tv[0])).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let grid = Grid::new(3, 0.6, 12).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.5).unwrap();
        let kappa = 6.0;
        let mut records = Vec::new();
        for xi in super::super::lattice_targets(&grid, 10.0) {
            let pairs = magnetic_pairs_for_xi(&xi, kappa).unwrap();
            records.push(FarFieldRecord {
                kappa,
                pairs: pairs
                    .into_iter()
                    .map(|p| crate::forward::FarFieldPair { theta: p.theta, d: p.d, value: Complex64::new(0.0, 0.0) })
                    .collect(),
            });
        }
        let (b, cov) = recover_magnetic(&records, &grid, class, 10.0).unwrap();
        assert!(b.components().iter().all(|c| c.iter().all(|v| *v == 0.0)));
        assert_eq!(cov.fraction(), 1.0);
    }
}
