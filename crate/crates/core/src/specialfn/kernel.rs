//! Outgoing fundamental solutions of the Helmholtz operator.

use super::bessel::hankel1;
use super::sector::{hankel0_sector, SectorPoint};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// G(κ, r): e^{iκr}/(4πr) in 3D, (i/4) H_0^{(1)}(κr) in 2D.
pub fn green_kernel(dim: usize, kappa: Complex64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Singularity(format!("kernel evaluated at r = {r}")));
    }
    match dim {
        3 => Ok((Complex64::i() * kappa * r).exp() / (4.0 * PI * r)),
        2 => {
            if kappa.im == 0.0 {
                let k = kappa.re;
                if k == 0.0 {
                    return Err(Error::Domain("2D kernel is undefined at zero frequency".into()));
                }
                let v = Complex64::new(0.0, 0.25) * hankel1(0, k.abs() * r)?;
                // negative real frequencies are the mirror image of positive ones
                Ok(if k > 0.0 { v } else { v.conj() })
            } else {
                hankel0_sector(SectorPoint::new(kappa)?, r)
            }
        }
        _ => Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

/// Radial derivative dG/dr at real frequency.
pub fn green_kernel_radial_derivative(dim: usize, kappa: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Singularity(format!("kernel derivative at r = {r}")));
    }
    match dim {
        3 => {
            let g = (Complex64::i() * kappa * r).exp() / (4.0 * PI * r);
            Ok(g * Complex64::new(-1.0 / r, kappa))
        }
        2 => {
            if !(kappa > 0.0) {
                return Err(Error::Domain(format!("2D gradient needs kappa > 0, got {kappa}")));
            }
            Ok(Complex64::new(0.0, 0.25) * kappa * -hankel1(1, kappa * r)?)
        }
        _ => Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

/// ∇_x G(κ, |x − y|).
pub fn green_kernel_gradient(kappa: f64, x: &[f64], y: &[f64]) -> Result<Vec<Complex64>> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("points of dimension {} and {}", x.len(), y.len())));
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let r = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::Singularity("coincident points".into()));
    }
    let dr = green_kernel_radial_derivative(x.len(), kappa, r)?;
    Ok(diff.iter().map(|v| dr * (v / r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let g = green_kernel(3, Complex64::new(2.0, 0.0), 0.5).unwrap();
        let closed = Complex64::new(0.0, 1.0).exp() / (2.0 * PI);
        assert!((g - closed).norm() < 1e-15);
        assert!((g - Complex64::new(0.0859918, 0.1339243)).norm() < 1e-7);
        let g0 = green_kernel(3, Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!((g0.re - 0.0795775).abs() < 1e-7 && g0.im == 0.0);
        let g2 = green_kernel(2, Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((g2 - Complex64::new(-0.0220642, 0.1912994)).norm() < 1e-7);
    }

    #[test]
    fn singular_and_domain_errors() {
        assert!(matches!(green_kernel(3, Complex64::new(1.0, 0.0), 0.0), Err(Error::Singularity(_))));
        assert!(green_kernel(2, Complex64::new(0.1, 1.0), 1.0).is_err());
        assert!(green_kernel_gradient(1.0, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn complex_2d_uses_sector_route() {
        let lam = Complex64::new(2.0, -0.5);
        let g = green_kernel(2, lam, 0.7).unwrap();
        let want = Complex64::new(-0.14293732503859242, 0.18598904838400946);
        assert!((g - want).norm() < 1e-8 * want.norm());
    }

    #[test]
    fn gradient_3d_closed_form() {
        let k = 3.0;
        let x = [0.3, -0.2, 0.5];
        let y = [0.0, 0.1, 0.0];
        let r = ((0.3f64).powi(2) + 0.3f64.powi(2) + 0.25).sqrt();
        let e = [0.3 / r, -0.3 / r, 0.5 / r];
        let g = green_kernel_gradient(k, &x, &y).unwrap();
        let radial = Complex64::new(-1.0 / r, k) * (Complex64::i() * k * r).exp() / (4.0 * PI * r);
        for i in 0..3 {
            assert!((g[i] - radial * e[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let step = 1e-5;
        let cases: [(usize, f64, Vec<f64>, Vec<f64>); 4] = [
            (3, 3.0, vec![0.7, 0.0, 0.0], vec![0.0, 0.0, 0.0]),
            (3, 8.0, vec![0.2, 0.4, -0.1], vec![-0.1, 0.0, 0.3]),
            (2, 3.0, vec![0.5, 0.2], vec![-0.1, 0.1]),
            (2, 16.0, vec![0.6, 0.0], vec![0.1, -0.2]),
        ];
        for (dim, k, x, y) in cases {
            let g = green_kernel_gradient(k, &x, &y).unwrap();
            let gy = green_kernel_gradient(k, &y, &x).unwrap();
            for i in 0..dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += step;
                xm[i] -= step;
                let dist = |p: &[f64]| p.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let kc = Complex64::new(k, 0.0);
                let fd = (green_kernel(dim, kc, dist(&xp)).unwrap() - green_kernel(dim, kc, dist(&xm)).unwrap())
                    / (2.0 * step);
                let norm = g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                assert!((fd - g[i]).norm() <= 1e-6 * norm, "dim {dim} k {k} axis {i}");
                // gradient in y is minus gradient in x, i.e. swapping arguments flips sign
                assert!((g[i] + gy[i]).norm() < 1e-14 * norm);
            }
        }
    }
}
