//! Forward scattering: Lippmann–Schwinger solves, far-field patterns,
//! boundary traces, the circle DtN map and synthetic noise.

mod data;
mod dtn;
pub mod gmres;
mod kernel_hat;
mod noise;
mod solver;

pub use data::{FarFieldPair, FarFieldRecord, NearFieldRecord, ScatteringDataset};
pub use dtn::{circle_points, dtn_circle, dtn_symbols};
pub use kernel_hat::{truncated_kernel_hat_2d, truncated_kernel_hat_3d};
pub use noise::add_noise;
pub use solver::{
    FarFieldConvention, ForwardSolver, PlaneWave, QuadratureRule, SolverConfig, TotalField, RESOLUTION_LIMIT,
};

use crate::error::{Error, Result};
use crate::fields::{fourier_forward, ComplexField, ScalarField, VectorField};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Solves for the total field of one incident plane wave.
pub fn solve_total_field(v: &ScalarField, b: Option<&VectorField>, wave: &PlaneWave, cfg: &SolverConfig) -> Result<TotalField> {
    ForwardSolver::new(v, b, wave.kappa(), cfg)?.solve(wave)
}

/// Far-field record for one incident direction and a list of observation directions.
pub fn far_field_pattern(solver: &ForwardSolver, u: &ComplexField, d: &[f64], thetas: &[Vec<f64>]) -> Result<FarFieldRecord> {
    let values = solver.far_field(u, thetas)?;
    Ok(FarFieldRecord {
        kappa: solver.kappa(),
        pairs: thetas.iter().zip(values).map(|(t, value)| FarFieldPair { theta: t.clone(), d: d.to_vec(), value }).collect(),
    })
}

/// Default boundary sample count max(64, 8⌈κR⌉).
pub fn boundary_count(kappa: f64, radius: f64) -> usize {
    64usize.max(8 * (kappa * radius).ceil() as usize)
}

/// Fibonacci-spiral points on the sphere of radius R.
pub fn sphere_points(radius: f64, m: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|j| {
            let z = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * j as f64;
            vec![radius * rho * phi.cos(), radius * rho * phi.sin(), radius * z]
        })
        .collect()
}

/// Uniform boundary sampling of ∂B_R in the grid dimension.
pub fn boundary_points(dim: usize, radius: f64, m: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        circle_points(radius, m)
    } else {
        sphere_points(radius, m)
    }
}

/// Near-field record of the scattered field on ∂B_R.
pub fn near_field_trace(
    solver: &ForwardSolver,
    u: &ComplexField,
    d: &[f64],
    points: Vec<Vec<f64>>,
    radius: f64,
) -> Result<NearFieldRecord> {
    if radius > solver.grid().half_width() {
        return Err(Error::Domain(format!("measurement radius {radius} lies outside the box")));
    }
    let (dirichlet, neumann) = solver.traces(u, &points, radius)?;
    let rec = NearFieldRecord { kappa: solver.kappa(), d: d.to_vec(), points, dirichlet, neumann };
    rec.validate(radius)?;
    Ok(rec)
}

/// Linearized far field V̂(κ(θ − d)), with the 1/(4π) factor in 3D.
pub fn born_oracle(v: &ScalarField, kappa: f64, theta: &[f64], d: &[f64]) -> Complex64 {
    let xi: Vec<f64> = theta.iter().zip(d).map(|(t, dd)| kappa * (t - dd)).collect();
    let val = fourier_forward(v, &xi);
    if v.grid().dim() == 3 {
        val / (4.0 * PI)
    } else {
        val
    }
}
