use crate::config::RunConfig;
use invscat::builtins::{bump, curl_field, gaussian, two_bump, MagneticProfile};
use invscat::fields::io::{load_field, save_field};
use invscat::fields::{l2_error, vector_l2_error, ClassParams, Grid, ScalarField, VectorField};
use invscat::forward::{
    add_noise, boundary_count, boundary_points, born_oracle, near_field_trace, sphere_points, FarFieldPair, FarFieldRecord, ForwardSolver,
    PlaneWave, ScatteringDataset, SolverConfig,
};
use invscat::reconstruct::{
    assemble_far_field_samples, direction_pair_for_xi, lattice_targets, magnetic_pairs_for_xi, reconstruct_potential, recover_electric,
    recover_magnetic, DirectionPair,
};
use invscat::specialfn::SectorPoint;
use invscat::stability::{
    continuation_mu, probe_scan, sweep_experiment, write_probe_csv, AnalyticSlab, DataModel, FrequencyBand, ProbeConfig, ProbeRow,
    SweepConfig,
};
use invscat::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

fn grid(cfg: &RunConfig) -> Result<Grid> {
    Grid::new(cfg.dim, cfg.half_width, cfg.n)
}

fn class(cfg: &RunConfig) -> Result<ClassParams> {
    ClassParams::new(cfg.smoothness, cfg.class_bound, cfg.radius)
}

pub fn solver_config(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        krylov_tol: cfg.krylov_tol,
        max_iterations: cfg.max_iterations,
        restart: cfg.restart,
        torus_factor: cfg.torus_factor,
        ..SolverConfig::default()
    }
}

pub fn build_potential(cfg: &RunConfig) -> Result<ScalarField> {
    if cfg.potential == "file" {
        let path = cfg.potential_file.as_ref().ok_or_else(|| Error::Domain("potential_file is not set".into()))?;
        let v = load_field(path)?;
        v.grid().check_same(&grid(cfg)?)?;
        return Ok(v);
    }
    let (g, c) = (grid(cfg)?, class(cfg)?);
    match cfg.potential.as_str() {
        "gaussian" => gaussian(g, c, cfg.amplitude, cfg.width),
        "bump" => bump(g, c, cfg.amplitude, cfg.width),
        "two_bump" => two_bump(g, c, cfg.amplitude),
        "zero" => ScalarField::zeros(g, c),
        other => Err(Error::Domain(format!("unknown potential '{other}'"))),
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

fn write_dataset(path: &Path, ds: &ScatteringDataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    ds.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn uniform_directions(dim: usize, m: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).map(|t| vec![t.cos(), t.sin()]).collect()
    } else {
        sphere_points(1.0, m)
    }
}

fn relative(rec: &ScalarField, truth: &ScalarField) -> Result<Option<f64>> {
    let zero = ScalarField::zeros(*truth.grid(), truth.class())?;
    let scale = l2_error(truth, &zero)?;
    Ok((scale > 0.0).then_some(l2_error(rec, truth)? / scale))
}

// one far-field value per pair, solves in parallel
fn solve_pairs(solver: &ForwardSolver, pairs: &[DirectionPair]) -> Result<Vec<FarFieldPair>> {
    let kappa = solver.kappa();
    pairs
        .par_iter()
        .map(|p| {
            let u = solver.solve(&PlaneWave::new(kappa, p.d.clone())?)?;
            let value = solver.far_field(&u.field, std::slice::from_ref(&p.theta))?[0];
            Ok(FarFieldPair { theta: p.theta.clone(), d: p.d.clone(), value })
        })
        .collect()
}

pub fn forward(cfg: &RunConfig) -> Result<String> {
    let v = build_potential(cfg)?;
    let g = *v.grid();
    let band = FrequencyBand::new(cfg.k0, cfg.k, cfg.band_count)?;
    let scfg = solver_config(cfg);
    let dir = out_dir(cfg)?;
    save_field(&v, &dir.join("potential.txt"))?;
    let dataset = if cfg.data == "far" {
        let mut records = Vec::new();
        for &kappa in &band.grid {
            let solver = ForwardSolver::new(&v, None, kappa, &scfg)?;
            let pairs = if cfg.directions == "lattice" {
                let targets = lattice_targets(&g, 2.0 * kappa);
                targets.iter().map(|xi| direction_pair_for_xi(xi, kappa)).collect::<Result<Vec<_>>>()?
            } else {
                let thetas = uniform_directions(cfg.dim, cfg.observation_directions);
                uniform_directions(cfg.dim, cfg.incident_directions)
                    .into_iter()
                    .flat_map(|d| thetas.iter().map(move |t| DirectionPair { theta: t.clone(), d: d.clone(), kappa }))
                    .collect()
            };
            records.push(FarFieldRecord { kappa, pairs: solve_pairs(&solver, &pairs)? });
        }
        ScatteringDataset::FarField { dim: cfg.dim, radius: cfg.radius, records }
    } else {
        let mr = cfg.measurement_radius;
        let mut records = Vec::new();
        for &kappa in &band.grid {
            let solver = ForwardSolver::new(&v, None, kappa, &scfg)?;
            let m = boundary_count(kappa, mr);
            let recs: Vec<_> = uniform_directions(cfg.dim, cfg.incident_directions)
                .par_iter()
                .map(|d| {
                    let u = solver.solve(&PlaneWave::new(kappa, d.clone())?)?;
                    near_field_trace(&solver, &u.field, d, boundary_points(cfg.dim, mr, m), mr)
                })
                .collect::<Result<_>>()?;
            records.extend(recs);
        }
        ScatteringDataset::NearField { dim: cfg.dim, radius: mr, records }
    };
    let name = if cfg.data == "far" { "far_field" } else { "near_field" };
    write_dataset(&dir.join(format!("{name}.csv")), &dataset)?;
    let mut msg = format!("wrote {}", dir.join(format!("{name}.csv")).display());
    if cfg.eta > 0.0 {
        let noisy = add_noise(&dataset, cfg.eta, cfg.seed)?;
        let path = dir.join(format!("{name}_noisy.csv"));
        write_dataset(&path, &noisy)?;
        msg += &format!(" and {}", path.display());
    }
    Ok(msg)
}

pub fn reconstruct(cfg: &RunConfig) -> Result<String> {
    let path: PathBuf = cfg.dataset.clone().unwrap_or_else(|| cfg.out.join("far_field.csv"));
    let file = File::open(&path).map_err(|e| Error::Lookup(format!("{}: {e}", path.display())))?;
    let dataset = ScatteringDataset::read_csv(std::io::BufReader::new(file))?;
    let records = match &dataset {
        ScatteringDataset::FarField { records, .. } => records,
        ScatteringDataset::NearField { .. } => {
            return Err(Error::Domain("reconstruct reads far-field datasets; generate them with data = far".into()))
        }
    };
    if dataset.dim() != cfg.dim {
        return Err(Error::Shape(format!("dataset is {}D but the config says dim = {}", dataset.dim(), cfg.dim)));
    }
    let g = grid(cfg)?;
    let samples = assemble_far_field_samples(records, cfg.dim)?;
    let (rec, coverage) = reconstruct_potential(&samples, cfg.k, &g, class(cfg)?, cfg.min_coverage)?;
    let dir = out_dir(cfg)?;
    save_field(&rec, &dir.join("reconstruction.txt"))?;
    fs::write(dir.join("coverage.txt"), coverage.to_string())?;
    let mut msg = format!("coverage {:.4}; wrote {}", coverage.fraction(), dir.join("reconstruction.txt").display());
    if cfg.potential != "zero" {
        if let Some(err) = relative(&rec, &build_potential(cfg)?)? {
            msg += &format!("; relative L2 error against the configured potential {err:.6}");
        }
    }
    Ok(msg)
}

fn write_vector_field(path: &Path, b: &VectorField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let g = b.grid();
    writeln!(w, "{} {} {}", g.dim(), g.points_per_axis(), g.half_width())?;
    let [x, y, z] = b.components();
    for i in 0..g.len() {
        writeln!(w, "{} {} {}", x[i], y[i], z[i])?;
    }
    w.flush()?;
    Ok(())
}

/// Data radius |ξ| ≤ 1.9κ, short of 2κ where the pairs degenerate to backscatter.
pub const MAGNETIC_CUTOFF: f64 = 1.9;

pub fn magnetic(cfg: &RunConfig) -> Result<String> {
    if cfg.dim != 3 {
        return Err(Error::Domain("magnetic runs need dim = 3".into()));
    }
    let (g, c) = (grid(cfg)?, class(cfg)?);
    let v = build_potential(cfg)?;
    let b = curl_field(g, c, MagneticProfile::Bump(cfg.magnetic_width), [0.0, 0.0, 1.0], cfg.magnetic_amplitude)?;
    let kappa = cfg.k;
    let cutoff = MAGNETIC_CUTOFF * kappa;
    let solver = ForwardSolver::new(&v, Some(&b), kappa, &solver_config(cfg))?;
    let mut pairs = Vec::new();
    for xi in lattice_targets(&g, cutoff) {
        pairs.extend(magnetic_pairs_for_xi(&xi, kappa)?);
    }
    let clean = ScatteringDataset::FarField {
        dim: 3,
        radius: cfg.radius,
        records: vec![FarFieldRecord { kappa, pairs: solve_pairs(&solver, &pairs)? }],
    };
    let data = if cfg.eta > 0.0 { add_noise(&clean, cfg.eta, cfg.seed)? } else { clean };
    let dir = out_dir(cfg)?;
    write_dataset(&dir.join("magnetic_far_field.csv"), &data)?;
    let ScatteringDataset::FarField { records, .. } = &data else { unreachable!("built as far-field data") };
    let (b_rec, coverage) = recover_magnetic(records, &g, c, cutoff)?;
    let (v_rec, _) = recover_electric(records, &b_rec, &g, c, cutoff / 2.0, cfg.min_coverage)?;
    write_vector_field(&dir.join("b_recovered.txt"), &b_rec)?;
    save_field(&v_rec, &dir.join("v_recovered.txt"))?;
    let b_err = vector_l2_error(&b_rec, &b)? / b.l2_norm();
    let v_err = relative(&v_rec, &v)?;
    let v_text = v_err.map_or("nan".to_string(), |e| e.to_string());
    let summary = format!(
        "kappa {kappa}\ncutoff {cutoff}\ncoverage {}\nb_relative_error {b_err}\nv_relative_error {v_text}\n",
        coverage.fraction()
    );
    fs::write(dir.join("magnetic_summary.txt"), &summary)?;
    let v_short = v_err.map_or("nan".to_string(), |e| format!("{e:.4}"));
    Ok(format!("b relative error {b_err:.4}, V relative error {v_short}; wrote {}", dir.display()))
}

pub fn sweep(cfg: &RunConfig) -> Result<String> {
    let truth = build_potential(cfg)?;
    let scfg = SweepConfig {
        k0: cfg.k0,
        ks: cfg.ks.clone(),
        band_count: cfg.band_count,
        eta: cfg.eta,
        trials: cfg.trials,
        seed: cfg.seed,
        model: if cfg.model == "born" { DataModel::Born } else { DataModel::Solver },
        solver: solver_config(cfg),
        min_coverage: cfg.min_coverage,
        potential: cfg.potential.clone(),
    };
    let mut report = sweep_experiment(&truth, &scfg)?;
    if !cfg.timings {
        report.rows.iter_mut().for_each(|r| r.runtime_s = 0.0);
    }
    let dir = out_dir(cfg)?;
    let path = dir.join("report.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    report.write_csv(&mut w)?;
    w.flush()?;
    let errs: Vec<String> = report.rows.iter().map(|r| format!("K={} {:.4}", r.k, r.recon_error)).collect();
    Ok(format!("errors {}; wrote {}", errs.join(", "), path.display()))
}

fn linspace(range: &[f64], count: usize) -> Vec<f64> {
    if count == 1 || range[0] == range[1] {
        return vec![range[0]];
    }
    (0..count).map(|j| range[0] + (range[1] - range[0]) * j as f64 / (count - 1) as f64).collect()
}

/// Largest grid the dense probe accepts per axis.
pub const PROBE_MAX_N: usize = 48;

pub fn probe_resolvent(cfg: &RunConfig) -> Result<String> {
    if cfg.dim != 2 {
        return Err(Error::Domain("probe-resolvent needs dim = 2".into()));
    }
    if cfg.n > PROBE_MAX_N {
        return Err(Error::Domain(format!("probe-resolvent assembles dense matrices; n = {} exceeds {PROBE_MAX_N}", cfg.n)));
    }
    let g = grid(cfg)?;
    let pcfg = ProbeConfig::new(cfg.probe_radius);
    let potential = if cfg.potential == "zero" { None } else { Some(build_potential(cfg)?) };
    let mut rows = Vec::new();
    let mut poles = Vec::new();
    for im in linspace(&cfg.probe_im, cfg.probe_im_count) {
        for re in linspace(&cfg.probe_re, cfg.probe_re_count) {
            let lam = SectorPoint::new(Complex64::new(re, im))?;
            match probe_scan(&[lam], &g, &pcfg, potential.as_ref()) {
                Ok(mut r) => rows.append(&mut r),
                Err(Error::Pole { re, im, sigma_min }) => {
                    poles.push(format!("{re}{im:+}i (sigma_min {sigma_min:.2e})"));
                    rows.push(ProbeRow { re_lambda: re, im_lambda: im, norm: f64::INFINITY, in_region: pcfg.in_region(Complex64::new(re, im)) });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let dir = out_dir(cfg)?;
    let path = dir.join("probe.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    write_probe_csv(&rows, &mut w)?;
    w.flush()?;
    let mut msg = format!("{} points; wrote {}", rows.len(), path.display());
    if !poles.is_empty() {
        msg += &format!("; pole candidates: {}", poles.join(", "));
    }
    Ok(msg)
}

pub fn continuation(cfg: &RunConfig) -> Result<String> {
    let (k0, k, d, m, eps) = (cfg.k0, cfg.k, cfg.slab_half_width, cfg.bound_m, cfg.epsilon);
    let slab = AnalyticSlab::new(k0, k, d)?;
    let omega = (m / eps).ln() / d;
    let c = 0.5 * (m / eps).ln() / (cfg.z_max - k);
    let dir = out_dir(cfg)?;
    let path = dir.join("continuation.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "z, mu, bound, p_constant, p_cosine, p_exponential, within_bound")?;
    let mut violations = 0;
    for j in 1..=cfg.samples {
        let z = k + (cfg.z_max - k) * j as f64 / cfg.samples as f64;
        let mu = continuation_mu(z, &slab)?;
        let bound = m * eps.powf(mu);
        let p = [eps, (eps * (omega * (z - k0)).cos()).abs(), eps * (c * (z - k)).exp()];
        let ok = p.iter().all(|v| *v <= bound);
        violations += usize::from(!ok);
        writeln!(w, "{z}, {mu}, {bound}, {}, {}, {}, {}", p[0], p[1], p[2], u8::from(ok))?;
    }
    w.flush()?;
    if violations > 0 {
        return Err(Error::Domain(format!("{violations} of {} samples exceed M·ε^μ(z); table in {}", cfg.samples, path.display())));
    }
    Ok(format!("{} samples within M·ε^μ(z); wrote {}", cfg.samples, path.display()))
}

/// Far field from the linearized model, used by selftest.
pub fn born_record(v: &ScalarField, kappa: f64) -> Result<FarFieldRecord> {
    let g = *v.grid();
    let pairs = lattice_targets(&g, 2.0 * kappa).iter().map(|xi| direction_pair_for_xi(xi, kappa)).collect::<Result<Vec<_>>>()?;
    Ok(FarFieldRecord {
        kappa,
        pairs: pairs
            .into_iter()
            .map(|p| {
                let value = born_oracle(v, kappa, &p.theta, &p.d);
                FarFieldPair { theta: p.theta, d: p.d, value }
            })
            .collect(),
    })
}
