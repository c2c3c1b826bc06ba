//! Dirichlet-to-Neumann map for outgoing fields outside a circle.

use crate::error::{Error, Result};
use crate::specialfn::hankel1;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// κ H_n^{(1)′}(κR) / H_n^{(1)}(κR) for n = 0..=n_max.
///
/// Uses the ratio recurrence q_{n+1} = 1/(2n/x − q_n), q_n = H_{n−1}/H_n, which
/// never forms the (overflowing) Hankel values of high order.
pub fn dtn_symbols(kappa: f64, radius: f64, n_max: usize) -> Result<Vec<Complex64>> {
    let x = kappa * radius;
    let h0 = hankel1(0, x)?;
    let h1 = hankel1(1, x)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(-kappa * h1 / h0);
    let mut q = h0 / h1;
    for n in 1..=n_max {
        out.push(kappa * (q - n as f64 / x));
        q = 1.0 / (2.0 * n as f64 / x - q);
    }
    Ok(out)
}

/// Samples φ_j = φ_0 + 2πj/M on the circle of radius R.
pub fn circle_points(radius: f64, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / m as f64;
            vec![radius * phi.cos(), radius * phi.sin()]
        })
        .collect()
}

/// Applies the DtN map to Dirichlet samples taken at uniformly spaced,
/// counter-clockwise ordered points on the circle of radius `radius`.
pub fn dtn_circle(points: &[Vec<f64>], dirichlet: &[Complex64], kappa: f64, radius: f64) -> Result<Vec<Complex64>> {
    let m = dirichlet.len();
    if points.len() != m || m == 0 {
        return Err(Error::Shape("need one boundary point per Dirichlet sample".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
    }
    let phi0 = points[0][1].atan2(points[0][0]);
    for (j, p) in points.iter().enumerate() {
        if p.len() != 2 {
            return Err(Error::Domain("circle DtN needs 2D points".into()));
        }
        let r = p[0].hypot(p[1]);
        let want = phi0 + 2.0 * PI * j as f64 / m as f64;
        let (ws, wc) = want.sin_cos();
        let off = ((p[0] - radius * wc).powi(2) + (p[1] - radius * ws).powi(2)).sqrt();
        if (r - radius).abs() > 1e-10 * radius || off > 1e-9 * radius {
            return Err(Error::Domain(format!("boundary sampling is not uniform at point {j}")));
        }
    }
    let symbols = dtn_symbols(kappa, radius, m / 2)?;
    let mut planner = FftPlanner::new();
    let mut buf = dirichlet.to_vec();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        // signed angular order; the symbol depends on |n| only
        let n = if k <= m / 2 { k } else { m - k };
        *v *= symbols[n];
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    Ok(buf.into_iter().map(|v| v * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::hankel1_derivative;

    #[test]
    fn symbols_match_bessel_route() {
        let (kappa, r) = (8.0, 0.6);
        let s = dtn_symbols(kappa, r, 60).unwrap();
        for n in 0..=60u32 {
            let want = kappa * hankel1_derivative(n, kappa * r).unwrap() / hankel1(n, kappa * r).unwrap();
            assert!((s[n as usize] - want).norm() <= 1e-10 * want.norm(), "n={n}");
        }
    }

    #[test]
    fn single_outgoing_mode() {
        let (kappa, r, m) = (8.0, 0.6, 64usize);
        let pts = circle_points(r, m);
        for n in [0i32, 3, -7, 20] {
            let hn = hankel1(n.unsigned_abs(), kappa * r).unwrap();
            let trace: Vec<Complex64> = pts.iter().map(|p| hn * Complex64::from_polar(1.0, n as f64 * p[1].atan2(p[0]))).collect();
            let out = dtn_circle(&pts, &trace, kappa, r).unwrap();
            let ratio = kappa * hankel1_derivative(n.unsigned_abs(), kappa * r).unwrap() / hn;
            for (o, t) in out.iter().zip(&trace) {
                assert!((o - ratio * t).norm() <= 1e-10 * (ratio * t).norm());
            }
        }
    }

    #[test]
    fn linear_and_zero_preserving() {
        let (kappa, r, m) = (5.0, 1.0, 48usize);
        let pts = circle_points(r, m);
        let zero = vec![Complex64::new(0.0, 0.0); m];
        assert!(dtn_circle(&pts, &zero, kappa, r).unwrap().iter().all(|v| v.norm() == 0.0));
        let a: Vec<Complex64> = (0..m).map(|j| Complex64::new((j as f64).sin(), 0.3 * j as f64 % 1.0)).collect();
        let b: Vec<Complex64> = (0..m).map(|j| Complex64::new((j as f64 * 0.7).cos(), -1.0)).collect();
        let c = Complex64::new(0.4, -2.0);
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + c * y).collect();
        let ta = dtn_circle(&pts, &a, kappa, r).unwrap();
        let tb = dtn_circle(&pts, &b, kappa, r).unwrap();
        let tm = dtn_circle(&pts, &mix, kappa, r).unwrap();
        for i in 0..m {
            assert!((tm[i] - ta[i] - c * tb[i]).norm() < 1e-10 * (1.0 + tm[i].norm()));
        }
    }

    #[test]
    fn rejects_non_uniform() {
        let mut pts = circle_points(1.0, 16);
        pts.swap(3, 4);
        assert!(dtn_circle(&pts, &vec![Complex64::new(1.0, 0.0); 16], 2.0, 1.0).is_err());
    }
}
