use super::{data_discrepancy, epsilon_limit, stability_exponents, theoretical_bound, FrequencyBand, ReportRow, StabilityReport};
use crate::error::{Error, Result};
use crate::fields::{l2_error, ScalarField};
use crate::forward::{add_noise, born_oracle, FarFieldPair, FarFieldRecord, ForwardSolver, PlaneWave, ScatteringDataset, SolverConfig};
use crate::reconstruct::{assemble_far_field_samples, direction_pair_for_xi, lattice_targets, reconstruct_potential};
use rayon::prelude::*;
use std::time::Instant;

/// How synthetic far-field data are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataModel {
    /// Linearized data V̂(κ(θ − d)) (with 1/(4π) in 3D).
    Born,
    /// Full Lippmann–Schwinger solves.
    Solver,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k0: f64,
    pub ks: Vec<f64>,
    /// Wavenumbers per band; only the top one reaches every node of |ξ| ≤ 2K.
    pub band_count: usize,
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
    pub model: DataModel,
    pub solver: SolverConfig,
    pub min_coverage: f64,
    pub potential: String,
}

/// splitmix64 over (base, K bits, trial).
pub fn derive_seed(base: u64, k: f64, trial: usize) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    mix(mix(mix(base) ^ k.to_bits()) ^ trial as u64)
}

/// Far-field data at κ for one direction pair per lattice node in |ξ| ≤ 2κ.
pub(crate) fn node_far_field(truth: &ScalarField, kappa: f64, model: DataModel, cfg: &SolverConfig) -> Result<FarFieldRecord> {
    let grid = truth.grid();
    let pairs: Vec<_> = lattice_targets(grid, 2.0 * kappa).iter().map(|xi| direction_pair_for_xi(xi, kappa)).collect::<Result<_>>()?;
    let values: Vec<num_complex::Complex64> = match model {
        DataModel::Born => pairs.iter().map(|p| born_oracle(truth, kappa, &p.theta, &p.d)).collect(),
        DataModel::Solver => {
            let solver = ForwardSolver::new(truth, None, kappa, cfg)?;
            pairs
                .par_iter()
                .map(|p| {
                    let u = solver.solve(&PlaneWave::new(kappa, p.d.clone())?)?;
                    Ok(solver.far_field(&u.field, std::slice::from_ref(&p.theta))?[0])
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(FarFieldRecord {
        kappa,
        pairs: pairs.into_iter().zip(values).map(|(p, value)| FarFieldPair { theta: p.theta, d: p.d, value }).collect(),
    })
}

fn relative_error(rec: &ScalarField, truth: &ScalarField) -> Result<f64> {
    let err = l2_error(rec, truth)?;
    let zero = ScalarField::zeros(*truth.grid(), truth.class())?;
    let scale = l2_error(truth, &zero)?;
    Ok(if scale > 0.0 { err / scale } else { err })
}

/// Reconstruction error against band limit K.
///
/// For each K the band [K0, K] is sampled with `band_count` wavenumbers; every
/// lattice node of |ξ| ≤ 2K is reached from the top of the band by one
/// direction pair, which is the sample binning keeps. Noise realizations use
/// seeds derived from (seed, K, trial). The error column is the mean relative
/// L²(B_R) error (absolute when the true potential vanishes), ε is the mean
/// over trials of √ε², and the bound is left empty when ε ≥ e^{−e}.
pub fn sweep_experiment(truth: &ScalarField, cfg: &SweepConfig) -> Result<StabilityReport> {
    let grid = *truth.grid();
    let dim = grid.dim();
    let exps = stability_exponents(truth.class().s, dim)?;
    if cfg.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let mut rows = Vec::new();
    for &k in &cfg.ks {
        let at = |e: Error| Error::AtBand { k, source: Box::new(e) };
        let start = Instant::now();
        let band = FrequencyBand::new(cfg.k0, k, cfg.band_count).map_err(at)?;
        let top = *band.grid.last().expect("band has at least one wavenumber");
        let record = node_far_field(truth, top, cfg.model, &cfg.solver).map_err(at)?;
        let clean = ScatteringDataset::FarField { dim, radius: truth.class().r, records: vec![record] };
        let trials: Vec<(f64, f64)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let noisy = add_noise(&clean, cfg.eta, derive_seed(cfg.seed, k, t))?;
                let eps2 = data_discrepancy(&noisy, &clean, &band)?;
                let records = match &noisy {
                    ScatteringDataset::FarField { records, .. } => records,
                    _ => unreachable!("sweep data are far-field"),
                };
                let samples = assemble_far_field_samples(records, dim)?;
                let (rec, _) = reconstruct_potential(&samples, k, &grid, truth.class(), cfg.min_coverage)?;
                Ok((relative_error(&rec, truth)?, eps2.sqrt()))
            })
            .collect::<Result<_>>()
            .map_err(at)?;
        let n = trials.len() as f64;
        let recon_error = trials.iter().map(|t| t.0).sum::<f64>() / n;
        let epsilon = trials.iter().map(|t| t.1).sum::<f64>() / n;
        let theoretical_bound = if epsilon > 0.0 && epsilon < epsilon_limit() { Some(theoretical_bound(k, epsilon, &exps)?) } else { None };
        rows.push(ReportRow { k, epsilon, recon_error, theoretical_bound, crossover: false, runtime_s: start.elapsed().as_secs_f64() });
    }
    let mut report = StabilityReport { dim, potential: cfg.potential.clone(), seed: cfg.seed, rows };
    report.finalize(&exps);
    Ok(report)
}
