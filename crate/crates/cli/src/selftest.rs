//! Fast invariant checks run by `invscat selftest`.

use crate::commands::born_record;
use invscat::builtins::{curl_field, gaussian, two_bump, MagneticProfile};
use invscat::fields::{l2_error, ClassParams, Grid, ScalarField};
use invscat::forward::{
    boundary_points, dtn_circle, near_field_trace, ForwardSolver, PlaneWave, ScatteringDataset, SolverConfig,
};
use invscat::reconstruct::{assemble_far_field_samples, reconstruct_potential};
use invscat::specialfn::SectorPoint;
use invscat::stability::{continuation_mu, resolvent_probe, stability_exponents, AnalyticSlab, ProbeConfig};
use invscat::{Error, Result};
use num_complex::Complex64;
use std::time::Instant;

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tight() -> SolverConfig {
    SolverConfig { krylov_tol: 1e-11, ..SolverConfig::default() }
}

fn zero_potential() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 32)?;
    let v = ScalarField::zeros(grid, ClassParams::new(1.0, 1.0, 0.8)?)?;
    let wave = PlaneWave::new(3.0, vec![0.6, 0.8])?;
    let solver = ForwardSolver::new(&v, None, 3.0, &SolverConfig::default())?;
    let u = solver.solve(&wave)?;
    let inc = wave.sample(&grid);
    let diff: Vec<Complex64> = u.field.values.iter().zip(&inc).map(|(a, b)| a - b).collect();
    let far = solver.far_field(&u.field, &[vec![1.0, 0.0]])?[0].norm();
    let rel = l2(&diff) / l2(&inc);
    Ok((rel <= 1e-12 && far == 0.0, format!("|u - u_inc|/|u_inc| = {rel:.1e}, |A| = {far:.1e}")))
}

fn born_quadratic() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 48)?;
    let class = ClassParams::new(1.0, 1.0, 0.6)?;
    let wave = PlaneWave::new(6.0, vec![0.6, 0.8])?;
    let remainder = |a: f64| -> Result<f64> {
        let v = gaussian(grid, class, a, 0.2)?;
        let solver = ForwardSolver::new(&v, None, 6.0, &tight())?;
        let u = solver.solve(&wave)?;
        let born = solver.born_field(&wave);
        Ok(l2(&u.field.values.iter().zip(&born).map(|(x, y)| x - y).collect::<Vec<_>>()))
    };
    let ratio = remainder(0.05)? / remainder(0.025)?;
    Ok(((ratio - 4.0).abs() < 0.2, format!("remainder ratio under halving {ratio:.3} (expect 4)")))
}

fn reciprocity() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 40)?;
    let v = two_bump(grid, ClassParams::new(1.0, 1.0, 0.7)?, 2.0)?;
    let kappa = 4.0;
    let solver = ForwardSolver::new(&v, None, kappa, &tight())?;
    let (theta, d) = (vec![0.8, 0.6], vec![0.0, -1.0]);
    let neg = |x: &[f64]| x.iter().map(|v| -v).collect::<Vec<f64>>();
    let a = solver.far_field(&solver.solve(&PlaneWave::new(kappa, d.clone())?)?.field, &[theta.clone()])?[0];
    let b = solver.far_field(&solver.solve(&PlaneWave::new(kappa, neg(&theta))?)?.field, &[neg(&d)])?[0];
    let rel = (a - b).norm() / a.norm();
    Ok((rel <= 1e-8, format!("|A(θ,d) - A(-d,-θ)|/|A| = {rel:.1e}")))
}

fn dense_oracle() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 12)?;
    let v = gaussian(grid, ClassParams::new(1.0, 1.0, 0.6)?, 0.3, 0.25)?;
    let solver = ForwardSolver::new(&v, None, 3.0, &tight())?;
    let wave = PlaneWave::new(3.0, vec![0.6, 0.8])?;
    let u = solver.solve(&wave)?;
    let table = solver.kernel_table();
    let m = solver.torus_points_per_axis();
    let ax: Vec<Complex64> = (0..grid.len())
        .map(|k| {
            let [ka, kb, _] = grid.index(k);
            let mut acc = u.field.values[k];
            for j in 0..grid.len() {
                let [ja, jb, _] = grid.index(j);
                acc += table[((ka + m - ja) % m) * m + (kb + m - jb) % m] * v.values()[j] * u.field.values[j];
            }
            acc
        })
        .collect();
    let rhs = wave.sample(&grid);
    let rel = l2(&ax.iter().zip(&rhs).map(|(a, b)| a - b).collect::<Vec<_>>()) / l2(&rhs);
    Ok((rel <= 1e-9, format!("dense residual {rel:.1e}")))
}

fn dtn() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 64)?;
    let v = gaussian(grid, ClassParams::new(1.0, 1.0, 0.6)?, 0.3, 0.25)?;
    let (kappa, radius) = (8.0, 0.8);
    let solver = ForwardSolver::new(&v, None, kappa, &tight())?;
    let d = vec![0.6, 0.8];
    let u = solver.solve(&PlaneWave::new(kappa, d.clone())?)?;
    let pts = boundary_points(2, radius, 256);
    let rec = near_field_trace(&solver, &u.field, &d, pts.clone(), radius)?;
    let t = dtn_circle(&pts, &rec.dirichlet, kappa, radius)?;
    let rel = l2(&rec.neumann.iter().zip(&t).map(|(a, b)| a - b).collect::<Vec<_>>()) / l2(&rec.neumann);
    Ok((rel <= 0.02, format!("Neumann trace vs DtN(Dirichlet) {rel:.2e}")))
}

fn exponents() -> Result<(bool, String)> {
    let e3 = stability_exponents(1.0, 3)?;
    let e2 = stability_exponents(1.0, 2)?;
    let ok = e3.alpha == 1.2 && e3.beta == 0.4 && e2.alpha == 0.3 && e2.beta == 0.1;
    Ok((ok, format!("s = 1: 3D ({}, {}), 2D ({}, {})", e3.alpha, e3.beta, e2.alpha, e2.beta)))
}

fn continuation() -> Result<(bool, String)> {
    let (k0, k, d, m, eps): (f64, f64, f64, f64, f64) = (2.0, 4.0, 1.0, 10.0, 1e-6);
    let slab = AnalyticSlab::new(k0, k, d)?;
    let z_max = k + 2.0;
    let omega = (m / eps).ln() / d;
    let c = 0.5 * (m / eps).ln() / (z_max - k);
    let mut violations = 0;
    for j in 1..=100 {
        let z = k + (z_max - k) * j as f64 / 100.0;
        let bound = m * eps.powf(continuation_mu(z, &slab)?);
        for p in [eps, eps * (omega * (z - k0)).cos(), eps * (c * (z - k)).exp()] {
            violations += usize::from(p.abs() > bound);
        }
    }
    Ok((violations == 0, format!("{violations} of 300 samples above M·ε^μ")))
}

fn resolvent_reflection() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 16)?;
    let cfg = ProbeConfig::new(0.8);
    let a = resolvent_probe(SectorPoint::new(Complex64::new(6.0, 0.3))?, &grid, &cfg, None)?;
    let b = resolvent_probe(SectorPoint::new(Complex64::new(-6.0, 0.3))?, &grid, &cfg, None)?;
    let rel = (a.norm - b.norm).abs() / a.norm;
    Ok((rel < 1e-8, format!("norm at λ vs -conj(λ): {rel:.1e}")))
}

fn born_reconstruction() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 48)?;
    let class = ClassParams::new(1.0, 1.0, 0.6)?;
    let v = gaussian(grid, class, 0.3, 0.15)?;
    let kappa = 12.0;
    let samples = assemble_far_field_samples(&[born_record(&v, kappa)?], 2)?;
    let (rec, _) = reconstruct_potential(&samples, kappa, &grid, class, 0.9)?;
    let zero = ScalarField::zeros(grid, class)?;
    let rel = l2_error(&rec, &v)? / l2_error(&v, &zero)?;
    Ok((rel < 0.01, format!("relative error from linearized data {rel:.2e}")))
}

fn divergence_free() -> Result<(bool, String)> {
    let grid = Grid::new(3, 0.6, 24)?;
    let b = curl_field(grid, ClassParams::new(1.0, 1.0, 0.5)?, MagneticProfile::Gaussian(0.1), [0.0, 0.0, 1.0], 0.05)?;
    let div = b.divergence().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((div < 1e-12, format!("max |∇·b| = {div:.1e}")))
}

fn csv_round_trip() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 24)?;
    let v = gaussian(grid, ClassParams::new(1.0, 1.0, 0.6)?, 0.3, 0.2)?;
    let solver = ForwardSolver::new(&v, None, 4.0, &SolverConfig::default())?;
    let d = vec![1.0, 0.0];
    let u = solver.solve(&PlaneWave::new(4.0, d.clone())?)?;
    let rec = near_field_trace(&solver, &u.field, &d, boundary_points(2, 0.8, 32), 0.8)?;
    let ds = ScatteringDataset::NearField { dim: 2, radius: 0.8, records: vec![rec] };
    let mut buf = Vec::new();
    ds.write_csv(&mut buf)?;
    let back = ScatteringDataset::read_csv(&buf[..])?;
    Ok((back == ds, format!("{} bytes", buf.len())))
}

pub fn run() -> Result<String> {
    let suites: [(&str, fn() -> Result<(bool, String)>); 12] = [
        ("zero potential", zero_potential),
        ("Born remainder is quadratic", born_quadratic),
        ("reciprocity", reciprocity),
        ("dense oracle", dense_oracle),
        ("DtN consistency", dtn),
        ("stability exponents", exponents),
        ("continuation bound", continuation),
        ("resolvent reflection symmetry", resolvent_reflection),
        ("linearized reconstruction", born_reconstruction),
        ("curl field is divergence free", divergence_free),
        ("dataset CSV round trip", csv_round_trip),
        ("resolution rule", resolution_rule),
    ];
    let mut failed = Vec::new();
    for (name, suite) in suites {
        let start = Instant::now();
        let (ok, detail) = suite().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} {name}: {detail} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(format!("selftest: all {} suites passed", suites.len()))
    } else {
        Err(Error::Domain(format!("selftest failed: {}", failed.join(", "))))
    }
}

fn resolution_rule() -> Result<(bool, String)> {
    let grid = Grid::new(2, 1.0, 16)?;
    let v = ScalarField::zeros(grid, ClassParams::new(1.0, 1.0, 0.6)?)?;
    let ok = matches!(ForwardSolver::new(&v, None, 8.0, &SolverConfig::default()), Err(Error::Resolution { .. }));
    Ok((ok, "κh = 1.0 rejected".into()))
}
