//! Grid-sampled potentials, discrete Fourier transforms and norms.

mod grid;
pub mod io;
mod samples;
pub mod spectral;

pub use grid::Grid;
pub use samples::{inverse_bandlimited, Coverage, FourierSample, FourierSampleSet, SampleBound};

use crate::error::{Error, Result};
use num_complex::Complex64;
use spectral::NdFft;

/// Class parameters (s, Q, R): Sobolev index, class bound, support radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub s: f64,
    pub q: f64,
    pub r: f64,
}

impl ClassParams {
    pub fn new(s: f64, q: f64, r: f64) -> Result<Self> {
        if !(s > 0.0 && q > 0.0 && r > 0.0) {
            return Err(Error::Domain(format!("class parameters must be positive: s={s} Q={q} R={r}")));
        }
        Ok(Self { s, q, r })
    }
}

/// Real scalar potential sampled on a grid, vanishing outside B_R.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    class: ClassParams,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, class: ClassParams) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        if class.r > grid.half_width() {
            return Err(Error::Domain(format!(
                "support radius {} exceeds the box half width {}",
                class.r,
                grid.half_width()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite value at sample {i}")));
            }
            if *v != 0.0 && grid.radius(i) > class.r {
                return Err(Error::Domain(format!(
                    "value {v} at |x| = {} outside the support radius {}",
                    grid.radius(i),
                    class.r
                )));
            }
        }
        Ok(Self { grid, values, class })
    }

    /// Samples `f` at every grid point and zeroes everything outside B_R.
    pub fn from_fn(grid: Grid, class: ClassParams, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                if grid.radius(i) > class.r {
                    0.0
                } else {
                    f(&p[..grid.dim()])
                }
            })
            .collect();
        Self::new(grid, values, class)
    }

    pub fn zeros(grid: Grid, class: ClassParams) -> Result<Self> {
        Self::new(grid, vec![0.0; grid.len()], class)
    }

    /// Zeroes samples outside B_R and builds the field.
    pub fn masked(grid: Grid, mut values: Vec<f64>, class: ClassParams) -> Result<Self> {
        for (i, v) in values.iter_mut().enumerate() {
            if grid.radius(i) > class.r {
                *v = 0.0;
            }
        }
        Self::new(grid, values, class)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class(&self) -> ClassParams {
        self.class
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect(), class: self.class }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Whether the sampled field satisfies the class bounds it carries.
    pub fn in_class(&self) -> bool {
        sobolev_norm(self, self.class.s) <= self.class.q && self.max_abs() <= self.class.q
    }
}

/// Real 3-vector potential on a 3D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: [Vec<f64>; 3],
    divergence_free: bool,
    class: ClassParams,
}

/// Relative divergence threshold below which a vector field is flagged divergence free.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

impl VectorField {
    /// Builds the field; the divergence-free flag is measured, not trusted.
    pub fn new(grid: Grid, components: [Vec<f64>; 3], class: ClassParams) -> Result<Self> {
        if grid.dim() != 3 {
            return Err(Error::Domain("vector potentials live on 3D grids".into()));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::Shape(format!("{} values for a grid of {}", c.len(), grid.len())));
            }
        }
        let mut field = Self { grid, components, divergence_free: false, class };
        field.divergence_free = field.relative_divergence() <= DIVERGENCE_TOLERANCE;
        Ok(field)
    }

    pub fn zeros(grid: Grid, class: ClassParams) -> Result<Self> {
        let z = vec![0.0; grid.len()];
        Self::new(grid, [z.clone(), z.clone(), z], class)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.components
    }

    pub fn class(&self) -> ClassParams {
        self.class
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// Spectral divergence (real part) at every grid point.
    pub fn divergence(&self) -> Vec<f64> {
        let fft = NdFft::new(&self.grid.shape());
        let comps: Vec<Vec<Complex64>> = self.components.iter().map(|c| to_complex(c)).collect();
        spectral_divergence_with(&fft, &self.grid, &comps).into_iter().map(|v| v.re).collect()
    }

    /// ‖∇·b‖ / (‖∇b‖-scale) with the scale taken as max|ξ|·‖b‖.
    pub fn relative_divergence(&self) -> f64 {
        let norm: f64 = self.components.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let div: f64 = self.divergence().iter().map(|v| v * v).sum::<f64>().sqrt();
        let xi_max = self.grid.dual_spacing() * (self.grid.points_per_axis() / 2) as f64;
        div / (xi_max * norm)
    }

    pub fn l2_norm(&self) -> f64 {
        let h3 = self.grid.cell_volume();
        (h3 * self.components.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Pointwise |b|².
    pub fn squared_magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum())
            .collect()
    }

    pub fn masked(&self) -> Result<Self> {
        let mut comps = self.components.clone();
        for c in comps.iter_mut() {
            for (i, v) in c.iter_mut().enumerate() {
                if self.grid.radius(i) > self.class.r {
                    *v = 0.0;
                }
            }
        }
        Self::new(self.grid, comps, self.class)
    }
}

/// Complex samples on a grid (total fields, scattered fields).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }
}

pub(crate) fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

// e^{iξ·R′} on the dual lattice is (−1)^{Σ m_a}
fn parity(grid: &Grid, flat: usize) -> f64 {
    let idx = grid.index(flat);
    if idx[..grid.dim()].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// V̂ on the dual lattice (transform ordering): Σ_j V(x_j) e^{−iξ·x_j} h^dim.
pub fn lattice_transform(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    let fft = NdFft::new(&grid.shape());
    lattice_transform_with(&fft, grid, values)
}

pub(crate) fn lattice_transform_with(fft: &NdFft, grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft.forward(&mut buf);
    let hd = grid.cell_volume();
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= hd * parity(grid, i);
    }
    buf
}

/// Inverse of [`lattice_transform`]: V_j = (2R′)^{−dim} Σ_k V̂_k e^{iξ_k·x_j}.
pub fn inverse_lattice_transform(grid: &Grid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let fft = NdFft::new(&grid.shape());
    inverse_lattice_transform_with(&fft, grid, spectrum)
}

pub(crate) fn inverse_lattice_transform_with(fft: &NdFft, grid: &Grid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let hd = grid.cell_volume();
    let mut buf: Vec<Complex64> = spectrum.iter().enumerate().map(|(i, v)| v * (parity(grid, i) / hd)).collect();
    fft.inverse(&mut buf);
    buf
}

/// Trapezoidal approximation of V̂(ξ) = ∫ V(x) e^{−iξ·x} dx at an arbitrary ξ.
pub fn fourier_forward(field: &ScalarField, xi: &[f64]) -> Complex64 {
    fourier_forward_values(field.grid(), field.values(), xi)
}

/// [`fourier_forward`] for raw grid samples that need not vanish outside B_R.
pub fn fourier_forward_values(grid: &Grid, values: &[f64], xi: &[f64]) -> Complex64 {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    // per-axis phase tables; cos/sin taken at |θ| so that −ξ gives exact conjugates
    let phases: Vec<Vec<Complex64>> = (0..dim)
        .map(|a| {
            (0..n)
                .map(|j| {
                    let theta = xi[a] * grid.coord(j);
                    let (s, c) = theta.abs().sin_cos();
                    Complex64::new(c, -s * theta.signum())
                })
                .collect()
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    if dim == 2 {
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += phases[1][j] * values[i * n + j];
            }
            total += phases[0][i] * row;
        }
    } else {
        for i in 0..n {
            let mut plane = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let mut row = Complex64::new(0.0, 0.0);
                let base = (i * n + j) * n;
                for k in 0..n {
                    row += phases[2][k] * values[base + k];
                }
                plane += phases[1][j] * row;
            }
            total += phases[0][i] * plane;
        }
    }
    total * grid.cell_volume()
}

/// Discrete H^s norm over the dual lattice.
pub fn sobolev_norm(field: &ScalarField, s: f64) -> f64 {
    let grid = field.grid();
    let spec = lattice_transform(grid, &to_complex(field.values()));
    let weight = (grid.dual_spacing() / (2.0 * std::f64::consts::PI)).powi(grid.dim() as i32);
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi = grid.wavevector(i);
            let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            (1.0 + xi2).powf(s) * v.norm_sqr()
        })
        .sum();
    (sum * weight).sqrt()
}

/// Discrete L²(B_R) norm of f1 − f2, with R taken from f1.
pub fn l2_error(f1: &ScalarField, f2: &ScalarField) -> Result<f64> {
    f1.grid().check_same(f2.grid())?;
    let grid = f1.grid();
    let r = f1.class().r;
    let sum: f64 = f1
        .values()
        .iter()
        .zip(f2.values())
        .enumerate()
        .filter(|(i, _)| grid.radius(*i) <= r)
        .map(|(_, (a, b))| (a - b) * (a - b))
        .sum();
    Ok((sum * grid.cell_volume()).sqrt())
}

/// Discrete L²(B_R) norm of a vector difference.
pub fn vector_l2_error(b1: &VectorField, b2: &VectorField) -> Result<f64> {
    b1.grid().check_same(b2.grid())?;
    let grid = b1.grid();
    let r = b1.class().r;
    let mut sum = 0.0;
    for c in 0..3 {
        for i in 0..grid.len() {
            if grid.radius(i) <= r {
                let d = b1.components()[c][i] - b2.components()[c][i];
                sum += d * d;
            }
        }
    }
    Ok((sum * grid.cell_volume()).sqrt())
}

/// Leray projection on the dual lattice; the ξ = 0 mode is kept.
pub fn divergence_free_project(b: &VectorField) -> Result<VectorField> {
    let grid = *b.grid();
    let fft = NdFft::new(&grid.shape());
    let mut spec: Vec<Vec<Complex64>> = b
        .components()
        .iter()
        .map(|c| {
            let mut buf = to_complex(c);
            fft.forward(&mut buf);
            buf
        })
        .collect();
    project_spectrum(&grid, &mut spec);
    let comps: Vec<Vec<f64>> = spec
        .into_iter()
        .map(|mut s| {
            fft.inverse(&mut s);
            s.into_iter().map(|v| v.re).collect()
        })
        .collect();
    let [x, y, z]: [Vec<f64>; 3] = comps.try_into().expect("three components");
    VectorField::new(grid, [x, y, z], b.class())
}

/// Removes the longitudinal part ξ(ξ·b̂)/|ξ|² at every node, in place.
pub(crate) fn project_spectrum(grid: &Grid, spec: &mut [Vec<Complex64>]) {
    for i in 0..grid.len() {
        let xi = grid.derivative_wavevector(i);
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if xi2 == 0.0 {
            continue;
        }
        let dot = spec[0][i] * xi[0] + spec[1][i] * xi[1] + spec[2][i] * xi[2];
        for a in 0..3 {
            spec[a][i] -= dot * (xi[a] / xi2);
        }
    }
}

/// ∂_a u for every axis, by multiplication with iξ_a.
pub fn spectral_gradient(u: &ComplexField) -> Vec<ComplexField> {
    let fft = NdFft::new(&u.grid.shape());
    spectral_gradient_with(&fft, &u.grid, &u.values)
        .into_iter()
        .map(|values| ComplexField { grid: u.grid, values })
        .collect()
}

pub(crate) fn spectral_gradient_with(fft: &NdFft, grid: &Grid, values: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut spec = values.to_vec();
    fft.forward(&mut spec);
    (0..grid.dim())
        .map(|a| {
            let mut d: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(i, v)| v * Complex64::new(0.0, grid.derivative_wavevector(i)[a]))
                .collect();
            fft.inverse(&mut d);
            d
        })
        .collect()
}

pub(crate) fn spectral_divergence_with(fft: &NdFft, grid: &Grid, comps: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (a, c) in comps.iter().enumerate() {
        let mut spec = c.clone();
        fft.forward(&mut spec);
        for (i, v) in spec.iter().enumerate() {
            acc[i] += v * Complex64::new(0.0, grid.derivative_wavevector(i)[a]);
        }
    }
    fft.inverse(&mut acc);
    acc
}
