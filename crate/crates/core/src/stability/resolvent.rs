//! Norm of the cut-off 2D resolvent ρ R(λ) ρ on a small grid.

use crate::builtins::bump_profile;
use crate::error::{Error, Result};
use crate::fields::{Grid, ScalarField};
use crate::specialfn::{green_kernel, SectorPoint};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

/// Smallest singular value of I + V G below which λ is reported as a pole.
pub const POLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    /// Radius of the smooth bump ρ; the support diameter is L = 2·radius.
    pub rho_radius: f64,
    /// Width of the admissible region Im λ ≥ −δ ln(1 + |λ|); must be below 1/(4L).
    pub delta: f64,
    pub max_power_iterations: usize,
}

impl ProbeConfig {
    /// δ = 1/(8L).
    pub fn new(rho_radius: f64) -> Self {
        Self { rho_radius, delta: 1.0 / (16.0 * rho_radius), max_power_iterations: 500 }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.rho_radius
    }

    pub fn in_region(&self, lambda: Complex64) -> bool {
        lambda.im >= -self.delta * (1.0 + lambda.norm()).ln() * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub lambda: Complex64,
    pub norm: f64,
    pub in_region: bool,
    /// Smallest singular value of I + V G when a potential is present.
    pub sigma_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub norm: f64,
    pub in_region: bool,
}

struct Discretization {
    rho: Vec<f64>,
    // G(x_i − x_j) h², self-cells averaged over the disk of equal area
    kernel: DMatrix<Complex64>,
    nodes: Vec<usize>,
}

// 8-point Gauss–Legendre on [0, 1]
fn gl01() -> [(f64, f64); 8] {
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329_0, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362_0, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let mut out = [(0.0, 0.0); 8];
    for k in 0..4 {
        out[2 * k] = (0.5 * (1.0 - X[k]), 0.5 * W[k]);
        out[2 * k + 1] = (0.5 * (1.0 + X[k]), 0.5 * W[k]);
    }
    out
}

/// (1/h²) ∫_{|x| ≤ a} G dx with πa² = h², by r = a u² and panelled Gauss–Legendre.
fn self_cell(lambda: Complex64, h: f64) -> Result<Complex64> {
    let a = h / PI.sqrt();
    let rule = gl01();
    let panels = 8;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        for &(x, w) in &rule {
            let u = (p as f64 + x) / panels as f64;
            let r = a * u * u;
            acc += green_kernel(2, lambda, r)? * (2.0 * PI * r * 2.0 * a * u * w / panels as f64);
        }
    }
    Ok(acc / (h * h))
}

fn discretize(lambda: Complex64, grid: &Grid, cfg: &ProbeConfig) -> Result<Discretization> {
    let nodes: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius(i) < cfg.rho_radius).collect();
    let rho: Vec<f64> = nodes.iter().map(|&i| bump_profile(&grid.point(i)[..2], &[0.0, 0.0], cfg.rho_radius)).collect();
    let h = grid.spacing();
    let idx: Vec<[usize; 3]> = nodes.iter().map(|&i| grid.index(i)).collect();
    // lattice offsets (|Δi|, |Δj|) repeat, so each distance is evaluated once
    let mut offsets: Vec<(usize, usize)> = Vec::new();
    let mut seen = HashMap::new();
    for a in &idx {
        for b in &idx {
            let key = (a[0].abs_diff(b[0]).min(a[1].abs_diff(b[1])), a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1])));
            if key != (0, 0) && !seen.contains_key(&key) {
                seen.insert(key, offsets.len());
                offsets.push(key);
            }
        }
    }
    let values: Vec<Complex64> = offsets
        .par_iter()
        .map(|&(p, q)| Ok(green_kernel(2, lambda, h * ((p * p + q * q) as f64).sqrt())? * (h * h)))
        .collect::<Result<_>>()?;
    let diag = self_cell(lambda, h)? * (h * h);
    let n = nodes.len();
    let kernel = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            return diag;
        }
        let (a, b) = (idx[r], idx[c]);
        let key = (a[0].abs_diff(b[0]).min(a[1].abs_diff(b[1])), a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1])));
        values[seen[&key]]
    });
    Ok(Discretization { rho, kernel, nodes })
}

// largest singular value by power iteration on the normal operator
fn largest_singular(apply: impl Fn(&[Complex64]) -> Vec<Complex64>, apply_adj: impl Fn(&[Complex64]) -> Vec<Complex64>, n: usize, iters: usize) -> f64 {
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 5) as f64 * 0.05)).collect();
    let mut sigma2 = 0.0;
    for _ in 0..iters {
        let xn = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= xn);
        let y = apply_adj(&apply(&x));
        let next: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        x = y;
        if (next - sigma2).abs() <= 1e-12 * next {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    sigma2.max(0.0).sqrt()
}

fn matvec(m: &DMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(x);
    (m * v).as_slice().to_vec()
}

fn matvec_adj(m: &DMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(x);
    m.ad_mul(&v).as_slice().to_vec()
}

fn probe_unchecked(lambda: SectorPoint, grid: &Grid, cfg: &ProbeConfig, potential: Option<&ScalarField>) -> Result<ProbeResult> {
    let lam = lambda.lambda();
    let disc = discretize(lam, grid, cfg)?;
    let n = disc.nodes.len();
    if n == 0 {
        return Err(Error::Domain("cutoff radius contains no grid points".into()));
    }
    let rho = &disc.rho;
    let weight = |x: &[Complex64]| -> Vec<Complex64> { x.iter().zip(rho).map(|(v, r)| v * *r).collect() };
    let in_region = cfg.in_region(lam);
    match potential {
        None => {
            let norm = largest_singular(
                |x| weight(&matvec(&disc.kernel, &weight(x))),
                |y| weight(&matvec_adj(&disc.kernel, &weight(y))),
                n,
                cfg.max_power_iterations,
            );
            Ok(ProbeResult { lambda: lam, norm, in_region, sigma_min: None })
        }
        Some(v) => {
            v.grid().check_same(grid)?;
            if v.class().r > cfg.rho_radius {
                return Err(Error::Domain("potential support must lie inside the cutoff".into()));
            }
            let vals: Vec<f64> = disc.nodes.iter().map(|&i| v.values()[i]).collect();
            // T = I + V G, and ρ R_V ρ ≈ ρ G T^{-1} ρ
            let mut t = disc.kernel.clone();
            for (r, vr) in vals.iter().enumerate() {
                t.row_mut(r).iter_mut().for_each(|e| *e *= *vr);
                t[(r, r)] += Complex64::new(1.0, 0.0);
            }
            let ta = t.adjoint();
            let lu = t.lu();
            let lua = ta.lu();
            let pole = |sigma: f64| Error::Pole { re: lam.re, im: lam.im, sigma_min: sigma };
            let solve = |x: &[Complex64]| -> Option<Vec<Complex64>> {
                lu.solve(&nalgebra::DVector::from_column_slice(x)).map(|s| s.as_slice().to_vec())
            };
            let solve_adj = |x: &[Complex64]| -> Option<Vec<Complex64>> {
                lua.solve(&nalgebra::DVector::from_column_slice(x)).map(|s| s.as_slice().to_vec())
            };
            if solve(&vec![Complex64::new(1.0, 0.0); n]).is_none() {
                return Err(pole(0.0));
            }
            let inv_norm = largest_singular(|x| solve(x).unwrap_or_default(), |y| solve_adj(y).unwrap_or_default(), n, cfg.max_power_iterations);
            let sigma_min = 1.0 / inv_norm;
            if !(sigma_min > POLE_TOLERANCE) {
                return Err(pole(sigma_min));
            }
            let norm = largest_singular(
                |x| weight(&matvec(&disc.kernel, &solve(&weight(x)).unwrap_or_default())),
                |y| weight(&solve_adj(&matvec_adj(&disc.kernel, &weight(y))).unwrap_or_default()),
                n,
                cfg.max_power_iterations,
            );
            Ok(ProbeResult { lambda: lam, norm, in_region, sigma_min: Some(sigma_min) })
        }
    }
}

/// ‖ρ R(λ) ρ‖ for the free resolvent (no potential) or its potential
/// surrogate ρ G (I + V G)^{-1} ρ, with G the grid matrix of the 2D kernel
/// times h².
pub fn resolvent_probe(lambda: SectorPoint, grid: &Grid, cfg: &ProbeConfig, potential: Option<&ScalarField>) -> Result<ProbeResult> {
    if grid.dim() != 2 {
        return Err(Error::Domain("resolvent probes are 2D only".into()));
    }
    let l = cfg.diameter();
    if !(cfg.delta > 0.0 && cfg.delta < 1.0 / (4.0 * l)) {
        return Err(Error::Domain(format!("delta = {} must lie in (0, 1/(4L)) with L = {l}", cfg.delta)));
    }
    if !cfg.in_region(lambda.lambda()) {
        return Err(Error::Domain(format!("lambda = {} lies below Im λ = −δ ln(1 + |λ|)", lambda.lambda())));
    }
    probe_unchecked(lambda, grid, cfg, potential)
}

/// Probe over a list of sector points; points below the admissible region
/// are still evaluated and flagged.
pub fn probe_scan(lambdas: &[SectorPoint], grid: &Grid, cfg: &ProbeConfig, potential: Option<&ScalarField>) -> Result<Vec<ProbeRow>> {
    if grid.dim() != 2 {
        return Err(Error::Domain("resolvent probes are 2D only".into()));
    }
    lambdas
        .iter()
        .map(|&lam| {
            let r = probe_unchecked(lam, grid, cfg, potential)?;
            Ok(ProbeRow { re_lambda: r.lambda.re, im_lambda: r.lambda.im, norm: r.norm, in_region: r.in_region })
        })
        .collect()
}

/// Sector points where I + V G is numerically singular, with the smallest
/// singular value found.
pub fn pole_candidates(lambdas: &[SectorPoint], grid: &Grid, cfg: &ProbeConfig, potential: &ScalarField) -> Result<Vec<(Complex64, f64)>> {
    let mut out = Vec::new();
    for &lam in lambdas {
        match probe_unchecked(lam, grid, cfg, Some(potential)) {
            Ok(_) => {}
            Err(Error::Pole { re, im, sigma_min }) => out.push((Complex64::new(re, im), sigma_min)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn write_probe_csv<W: Write>(rows: &[ProbeRow], mut w: W) -> Result<()> {
    writeln!(w, "re_lambda, im_lambda, norm, in_region")?;
    for r in rows {
        writeln!(w, "{}, {}, {}, {}", r.re_lambda, r.im_lambda, r.norm, u8::from(r.in_region))?;
    }
    Ok(())
}
