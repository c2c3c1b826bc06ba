//! Builtin test potentials.

use crate::error::{Error, Result};
use crate::fields::spectral::NdFft;
use crate::fields::{spectral_gradient_with, to_complex, ClassParams, Grid, ScalarField, VectorField};

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// A e^{−|x|²/(2σ²)}, cut to B_R.
pub fn gaussian(grid: Grid, class: ClassParams, amplitude: f64, sigma: f64) -> Result<ScalarField> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    ScalarField::from_fn(grid, class, |x| amplitude * (-norm2(x) / (2.0 * sigma * sigma)).exp())
}

/// Smooth compactly supported bump e^{1 − 1/(1 − t²)}, t = |x − c|/ρ; equals 1 at the center.
pub fn bump_profile(x: &[f64], center: &[f64], rho: f64) -> f64 {
    let t2 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (rho * rho);
    if t2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t2)).exp()
    }
}

/// Centered bump of radius ρ ≤ R and height A.
pub fn bump(grid: Grid, class: ClassParams, amplitude: f64, rho: f64) -> Result<ScalarField> {
    if !(rho > 0.0 && rho <= class.r) {
        return Err(Error::Domain(format!("bump radius {rho} must lie in (0, R]")));
    }
    let center = vec![0.0; grid.dim()];
    ScalarField::from_fn(grid, class, |x| amplitude * bump_profile(x, &center, rho))
}

/// Two bumps of different size, height and sign, off-center so the field
/// has no symmetry.
pub fn two_bump(grid: Grid, class: ClassParams, amplitude: f64) -> Result<ScalarField> {
    let r = class.r;
    let dim = grid.dim();
    let mut c1 = vec![0.0; dim];
    let mut c2 = vec![0.0; dim];
    c1[0] = 0.35 * r;
    c1[1] = 0.15 * r;
    c2[0] = -0.35 * r;
    c2[1] = -0.3 * r;
    if dim == 3 {
        c1[2] = 0.1 * r;
        c2[2] = -0.15 * r;
    }
    ScalarField::from_fn(grid, class, |x| {
        amplitude * (bump_profile(x, &c1, 0.55 * r) - 0.6 * bump_profile(x, &c2, 0.4 * r))
    })
}

/// Scalar profile used for the magnetic vector potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagneticProfile {
    /// Bump of the given radius.
    Bump(f64),
    /// Gaussian of the given width.
    Gaussian(f64),
}

impl MagneticProfile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            MagneticProfile::Bump(rho) => bump_profile(x, &[0.0, 0.0, 0.0], rho),
            MagneticProfile::Gaussian(sigma) => (-norm2(x) / (2.0 * sigma * sigma)).exp(),
        }
    }
}

/// b = ∇ × (ψ w) = ∇ψ × w for a fixed axis w, with ∇ taken spectrally so the
/// discrete divergence vanishes to rounding. Scaled so max|b| = amplitude.
pub fn curl_field(grid: Grid, class: ClassParams, profile: MagneticProfile, axis: [f64; 3], amplitude: f64) -> Result<VectorField> {
    if grid.dim() != 3 {
        return Err(Error::Domain("magnetic fields need a 3D grid".into()));
    }
    let wn = norm2(&axis).sqrt();
    if wn == 0.0 {
        return Err(Error::Domain("axis must be non-zero".into()));
    }
    let w = [axis[0] / wn, axis[1] / wn, axis[2] / wn];
    let psi: Vec<f64> = (0..grid.len())
        .map(|i| if grid.radius(i) <= class.r { profile.eval(&grid.point(i)) } else { 0.0 })
        .collect();
    let fft = NdFft::new(&grid.shape());
    let grad = spectral_gradient_with(&fft, &grid, &to_complex(&psi));
    let g: Vec<Vec<f64>> = grad.into_iter().map(|c| c.into_iter().map(|v| v.re).collect()).collect();
    let mut comps = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for i in 0..grid.len() {
        comps[0][i] = g[1][i] * w[2] - g[2][i] * w[1];
        comps[1][i] = g[2][i] * w[0] - g[0][i] * w[2];
        comps[2][i] = g[0][i] * w[1] - g[1][i] * w[0];
    }
    let peak = (0..grid.len()).map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Domain("vector potential profile vanishes on the grid".into()));
    }
    let scale = amplitude / peak;
    for c in comps.iter_mut() {
        c.iter_mut().for_each(|v| *v *= scale);
    }
    VectorField::new(grid, comps, class)
}

/// Gradient ∇φ of a scalar profile of height `amplitude`, taken spectrally
/// (the gauge perturbation b ↦ b + ∇φ).
pub fn gradient_field(grid: Grid, class: ClassParams, profile: MagneticProfile, amplitude: f64) -> Result<(ScalarField, VectorField)> {
    let phi = ScalarField::from_fn(grid, class, |x| amplitude * profile.eval(x))?;
    let fft = NdFft::new(&grid.shape());
    let grad = spectral_gradient_with(&fft, &grid, &to_complex(phi.values()));
    let [x, y, z]: [Vec<f64>; 3] = grad
        .into_iter()
        .map(|c| c.into_iter().map(|v| v.re).collect::<Vec<f64>>())
        .collect::<Vec<_>>()
        .try_into()
        .map_err(|_| Error::Shape("gradient needs three components".into()))?;
    Ok((phi, VectorField::new(grid, [x, y, z], class)?))
}

/// Componentwise sum of two vector fields on one grid.
pub fn add_vector_fields(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    a.grid().check_same(b.grid())?;
    let comps = [0, 1, 2].map(|c| a.components()[c].iter().zip(&b.components()[c]).map(|(x, y)| x + y).collect());
    VectorField::new(*a.grid(), comps, a.class())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump_profile(&[0.0, 0.0], &[0.0, 0.0], 1.0), 1.0);
        assert_eq!(bump_profile(&[1.0, 0.0], &[0.0, 0.0], 1.0), 0.0);
        assert!(bump_profile(&[0.5, 0.0], &[0.0, 0.0], 1.0) < 1.0);
    }

    #[test]
    fn curl_field_is_divergence_free_with_requested_peak() {
        let grid = Grid::new(3, 0.6, 16).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.5).unwrap();
        let b = curl_field(grid, class, MagneticProfile::Gaussian(0.12), [0.3, 0.5, 0.8], 0.05).unwrap();
        assert!(b.is_divergence_free());
        let peak = (0..grid.len()).map(|i| b.components().iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()).fold(0.0, f64::max);
        assert!((peak - 0.05).abs() < 1e-15);
    }

    #[test]
    fn two_bump_is_asymmetric() {
        let grid = Grid::new(2, 1.0, 32).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.6).unwrap();
        let f = two_bump(grid, class, 1.0).unwrap();
        let v = f.values();
        let mirrored: f64 = (0..grid.len()).map(|i| (v[i] - v[grid.mirror(i)]).abs()).sum();
        assert!(mirrored > 1.0);
    }
}
