use super::{dot, norm, IncidentPair};
use crate::error::{Error, Result};
use crate::forward::NearFieldRecord;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Equal quadrature weight |∂B_R|/M for M uniform points on the circle or
/// (Fibonacci) sphere of radius R.
pub fn boundary_weight(dim: usize, radius: f64, m: usize) -> f64 {
    let area = if dim == 2 { 2.0 * PI * radius } else { 4.0 * PI * radius * radius };
    area / m as f64
}

fn lookup<'a>(records: &'a [NearFieldRecord], kappa: f64, d: &[f64]) -> Result<&'a NearFieldRecord> {
    records
        .iter()
        .find(|r| (r.kappa - kappa).abs() <= 1e-12 * kappa && r.d.len() == d.len() && r.d.iter().zip(d).all(|(a, b)| (a - b).abs() <= 1e-12))
        .ok_or_else(|| Error::Lookup(format!("no near-field record at κ = {kappa}, d = {d:?}")))
}

// total-field Dirichlet and Neumann traces; a missing record means the free field
fn total_traces(rec: Option<&NearFieldRecord>, points: &[Vec<f64>], kappa: f64, d: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut u = Vec::with_capacity(points.len());
    let mut un = Vec::with_capacity(points.len());
    for (j, x) in points.iter().enumerate() {
        let r = norm(x);
        let inc = Complex64::from_polar(1.0, kappa * dot(x, d));
        let inc_n = Complex64::new(0.0, kappa * dot(x, d) / r) * inc;
        match rec {
            Some(rec) => {
                u.push(inc + rec.dirichlet[j]);
                un.push(inc_n + rec.neumann[j]);
            }
            None => {
                u.push(inc);
                un.push(inc_n);
            }
        }
    }
    (u, un)
}

fn same_points(a: &NearFieldRecord, b: &NearFieldRecord) -> bool {
    a.points.len() == b.points.len() && a.points.iter().zip(&b.points).all(|(p, q)| p.iter().zip(q).all(|(x, y)| (x - y).abs() <= 1e-12))
}

/// Estimate of V̂(−κ(d1 + d2)) for V = V2 − V1 from boundary traces.
///
/// `measured` holds the scattered traces of the unknown V2, `reference` those
/// of the known V1 (`None` for V1 = 0). Both boundary integrals
/// ∫(u1 ∂_ν u2 − u2 ∂_ν u1), with the roles of d1 and d2 swapped in the
/// second, are formed by equal-weight quadrature and averaged.
pub fn near_field_fourier_estimate(
    reference: Option<&[NearFieldRecord]>,
    measured: &[NearFieldRecord],
    pair: &IncidentPair,
) -> Result<Complex64> {
    let k = pair.kappa;
    let m2 = lookup(measured, k, &pair.d2)?;
    let m1 = lookup(measured, k, &pair.d1)?;
    let (r1, r2) = match reference {
        Some(recs) => (Some(lookup(recs, k, &pair.d1)?), Some(lookup(recs, k, &pair.d2)?)),
        None => (None, None),
    };
    for rec in [Some(m1), r1, r2].into_iter().flatten() {
        if !same_points(rec, m2) {
            return Err(Error::Alignment("records use different boundary points".into()));
        }
    }
    let points = &m2.points;
    if points.is_empty() {
        return Err(Error::Shape("record has no boundary points".into()));
    }
    let dim = points[0].len();
    let w = boundary_weight(dim, norm(&points[0]), points.len());
    let integral = |a: &(Vec<Complex64>, Vec<Complex64>), b: &(Vec<Complex64>, Vec<Complex64>)| -> Complex64 {
        (0..points.len()).map(|j| a.0[j] * b.1[j] - b.0[j] * a.1[j]).sum::<Complex64>() * w
    };
    // V1 field at d1 against V2 field at d2, then the roles of d1 and d2 swapped
    let first = integral(&total_traces(r1, points, k, &pair.d1), &total_traces(Some(m2), points, k, &pair.d2));
    let second = integral(&total_traces(r2, points, k, &pair.d2), &total_traces(Some(m1), points, k, &pair.d1));
    Ok(0.5 * (first + second))
}
