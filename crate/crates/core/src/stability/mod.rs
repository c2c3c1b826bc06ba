//! Stability quantities: data discrepancy, the analytic-continuation bound,
//! stability exponents and the two-term error bound, K-sweeps and 2D
//! resolvent-norm probes.

mod resolvent;
mod sweep;

pub use resolvent::{pole_candidates, probe_scan, resolvent_probe, write_probe_csv, ProbeConfig, ProbeResult, ProbeRow};
pub use sweep::{derive_seed, sweep_experiment, DataModel, SweepConfig};

use crate::error::{Error, Result};
use crate::forward::{dtn_circle, ScatteringDataset};
use crate::reconstruct::boundary_weight;
use num_complex::Complex64;
use std::f64::consts::{E, PI};
use std::io::Write;

/// Frequency interval [K0, K] with an ascending sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBand {
    pub k0: f64,
    pub k: f64,
    pub grid: Vec<f64>,
}

impl FrequencyBand {
    /// `count` equally spaced wavenumbers from K0 to K (just K when count = 1).
    pub fn new(k0: f64, k: f64, count: usize) -> Result<Self> {
        if !(k0 > 0.0 && k > k0) {
            return Err(Error::Domain(format!("band needs K > K0 > 0, got K0 = {k0}, K = {k}")));
        }
        if count == 0 {
            return Err(Error::Domain("band needs at least one wavenumber".into()));
        }
        let grid = if count == 1 {
            vec![k]
        } else {
            (0..count).map(|j| k0 + (k - k0) * j as f64 / (count - 1) as f64).collect()
        };
        Ok(Self { k0, k, grid })
    }

    pub fn contains(&self, kappa: f64) -> bool {
        kappa >= self.k0 * (1.0 - 1e-12) && kappa <= self.k * (1.0 + 1e-12)
    }
}

/// Slab (K0, ∞) × (−d, d) in which the data continue analytically; a = K − K0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSlab {
    pub k0: f64,
    pub half_width: f64,
    pub a: f64,
}

impl AnalyticSlab {
    pub fn new(k0: f64, k: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(k > k0) {
            return Err(Error::Domain(format!("slab needs d > 0 and K > K0, got d = {half_width}, K0 = {k0}, K = {k}")));
        }
        Ok(Self { k0, half_width, a: k - k0 })
    }

    pub fn k(&self) -> f64 {
        self.k0 + self.a
    }
}

/// 64ad/(3π²(a² + 4d²)) · e^{(π/2d)(a/2 − z)}, with no restriction on z.
pub fn mu_lower_bound(z: f64, a: f64, d: f64) -> f64 {
    64.0 * a * d / (3.0 * PI * PI * (a * a + 4.0 * d * d)) * ((PI / (2.0 * d)) * (0.5 * a - z)).exp()
}

/// Continuation exponent μ(z) for z beyond the data interval.
pub fn continuation_mu(z: f64, slab: &AnalyticSlab) -> Result<f64> {
    if !(z > slab.k()) {
        return Err(Error::Domain(format!("z = {z} must exceed K = {}", slab.k())));
    }
    Ok(mu_lower_bound(z, slab.a, slab.half_width))
}

/// M ε^μ.
pub fn continuation_bound(m: f64, epsilon: f64, mu: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("slab bound must be positive, got {m}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("mu must lie in (0, 1], got {mu}")));
    }
    Ok(m * epsilon.powf(mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityExponents {
    pub s: f64,
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
}

pub fn stability_exponents(s: f64, dim: usize) -> Result<StabilityExponents> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("smoothness must be positive, got {s}")));
    }
    let (alpha, beta) = match dim {
        3 => (6.0 / (3.0 + 2.0 * s), 2.0 * s / (3.0 + 2.0 * s)),
        2 => (3.0 / (2.0 * (3.0 + 2.0 * s)), s / (2.0 * (3.0 + 2.0 * s))),
        _ => return Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}"))),
    };
    Ok(StabilityExponents { s, dim, alpha, beta })
}

/// Largest ε for which ln|ln ε| is positive.
pub fn epsilon_limit() -> f64 {
    (-E).exp()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < epsilon_limit()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, e^-e)")));
    }
    Ok(())
}

/// K^α ε² + 1/(K^β (ln|ln ε|)^β), constant taken as 1.
pub fn theoretical_bound(k: f64, epsilon: f64, exps: &StabilityExponents) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    check_epsilon(epsilon)?;
    let loglog = epsilon.ln().abs().ln();
    Ok(k.powf(exps.alpha) * epsilon * epsilon + 1.0 / (k.powf(exps.beta) * loglog.powf(exps.beta)))
}

/// K where ∂_K of the bound vanishes: below it the logarithmic term
/// dominates, above it the amplified data term does.
pub fn crossover_k(epsilon: f64, exps: &StabilityExponents) -> Result<f64> {
    check_epsilon(epsilon)?;
    let c = epsilon.ln().abs().ln().powf(-exps.beta);
    Ok((exps.beta * c / (exps.alpha * epsilon * epsilon)).powf(1.0 / (exps.alpha + exps.beta)))
}

/// ε² between two aligned datasets over the band.
///
/// Far field: max |ΔA∞|². Near field: max over (κ, d) of
/// 2(κ²‖Δu^s‖² + ‖∂_ν Δu^s‖²) on ∂B_R, where in 2D the Neumann difference is
/// the DtN image of the Dirichlet difference.
pub fn data_discrepancy(d1: &ScatteringDataset, d2: &ScatteringDataset, band: &FrequencyBand) -> Result<f64> {
    if d1.dim() != d2.dim() || (d1.radius() - d2.radius()).abs() > 1e-12 * d1.radius().max(1.0) {
        return Err(Error::Alignment("datasets differ in dimension or radius".into()));
    }
    let mut best: Option<f64> = None;
    match (d1, d2) {
        (ScatteringDataset::FarField { records: r1, .. }, ScatteringDataset::FarField { records: r2, .. }) => {
            if r1.len() != r2.len() {
                return Err(Error::Alignment(format!("{} vs {} far-field records", r1.len(), r2.len())));
            }
            for (a, b) in r1.iter().zip(r2) {
                if a.kappa != b.kappa || a.pairs.len() != b.pairs.len() {
                    return Err(Error::Alignment(format!("records at κ = {} and κ = {} differ", a.kappa, b.kappa)));
                }
                if !band.contains(a.kappa) {
                    continue;
                }
                for (p, q) in a.pairs.iter().zip(&b.pairs) {
                    if !close(&p.theta, &q.theta) || !close(&p.d, &q.d) {
                        return Err(Error::Alignment(format!("direction pairs differ at κ = {}", a.kappa)));
                    }
                    let v = (p.value - q.value).norm_sqr();
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
        }
        (ScatteringDataset::NearField { records: r1, dim, radius }, ScatteringDataset::NearField { records: r2, .. }) => {
            if r1.len() != r2.len() {
                return Err(Error::Alignment(format!("{} vs {} near-field records", r1.len(), r2.len())));
            }
            for (a, b) in r1.iter().zip(r2) {
                if a.kappa != b.kappa || !close(&a.d, &b.d) || a.points.len() != b.points.len() {
                    return Err(Error::Alignment(format!("records at κ = {} differ in direction or sampling", a.kappa)));
                }
                if a.points.iter().zip(&b.points).any(|(p, q)| !close(p, q)) {
                    return Err(Error::Alignment("boundary points differ".into()));
                }
                if !band.contains(a.kappa) {
                    continue;
                }
                let du: Vec<Complex64> = a.dirichlet.iter().zip(&b.dirichlet).map(|(x, y)| x - y).collect();
                let dn: Vec<Complex64> = if *dim == 2 {
                    dtn_circle(&a.points, &du, a.kappa, *radius)?
                } else {
                    a.neumann.iter().zip(&b.neumann).map(|(x, y)| x - y).collect()
                };
                let w = boundary_weight(*dim, *radius, a.points.len());
                let nu: f64 = du.iter().map(|v| v.norm_sqr()).sum::<f64>() * w;
                let nn: f64 = dn.iter().map(|v| v.norm_sqr()).sum::<f64>() * w;
                let v = 2.0 * (a.kappa * a.kappa * nu + nn);
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        _ => return Err(Error::Alignment("cannot compare near-field with far-field data".into())),
    }
    best.ok_or_else(|| Error::Alignment(format!("no records inside the band [{}, {}]", band.k0, band.k)))
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k: f64,
    pub epsilon: f64,
    pub recon_error: f64,
    /// Absent when ε is too large for the iterated logarithm.
    pub theoretical_bound: Option<f64>,
    pub crossover: bool,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub dim: usize,
    pub potential: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl StabilityReport {
    /// Sorts rows by K and flags the first row at or beyond the crossover
    /// computed from the largest ε in the report.
    pub fn finalize(&mut self, exps: &StabilityExponents) {
        self.rows.sort_by(|a, b| a.k.total_cmp(&b.k));
        for r in self.rows.iter_mut() {
            r.crossover = false;
        }
        let eps = self.rows.iter().map(|r| r.epsilon).fold(0.0, f64::max);
        if let Ok(kstar) = crossover_k(eps, exps) {
            if let Some(r) = self.rows.iter_mut().find(|r| r.k >= kstar) {
                r.crossover = true;
            }
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# dim {} potential {} seed {}", self.dim, self.potential, self.seed)?;
        writeln!(w, "K, epsilon, recon_error, theoretical_bound, crossover_flag, runtime_s")?;
        for r in &self.rows {
            let bound = r.theoretical_bound.map_or("nan".to_string(), |b| b.to_string());
            writeln!(w, "{}, {}, {}, {}, {}, {:.3}", r.k, r.epsilon, r.recon_error, bound, u8::from(r.crossover), r.runtime_s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{circle_points, FarFieldPair, FarFieldRecord, NearFieldRecord};

    #[test]
    fn mu_formula_at_zero_argument() {
        // a = 2, d = 1, z = a/2
        assert!((mu_lower_bound(1.0, 2.0, 1.0) - 128.0 / (24.0 * PI * PI)).abs() < 1e-15);
        assert!((mu_lower_bound(1.0, 2.0, 1.0) - 0.5403796).abs() < 1e-7);
        let slab = AnalyticSlab::new(2.0, 4.0, 1.0).unwrap();
        assert!(continuation_mu(4.0, &slab).is_err());
        let mut prev = f64::INFINITY;
        for j in 1..50 {
            let mu = continuation_mu(4.0 + 0.3 * j as f64, &slab).unwrap();
            assert!(mu > 0.0 && mu < prev);
            prev = mu;
        }
        assert!(continuation_mu(400.0, &slab).unwrap() < 1e-200);
    }

    #[test]
    fn continuation_bound_values() {
        assert!((continuation_bound(2.0, 1e-4, 0.25).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(continuation_bound(3.0, 0.01, 1.0).unwrap(), 3.0 * 0.01);
        assert!((continuation_bound(3.0, 0.01, 1e-12).unwrap() - 3.0).abs() < 1e-10);
        assert!(continuation_bound(3.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn exponents_and_bound() {
        let e3 = stability_exponents(1.0, 3).unwrap();
        assert_eq!((e3.alpha, e3.beta), (1.2, 0.4));
        let e2 = stability_exponents(1.0, 2).unwrap();
        assert_eq!((e2.alpha, e2.beta), (0.3, 0.1));
        let big = stability_exponents(1e9, 3).unwrap();
        assert!(big.alpha < 1e-8 && (big.beta - 1.0).abs() < 1e-8);
        let b = theoretical_bound(10.0, 1e-3, &e3).unwrap();
        let want = 10f64.powf(1.2) * 1e-6 + 1.0 / (10f64.powf(0.4) * (1000f64.ln().ln()).powf(0.4));
        assert!((b - want).abs() < 1e-15);
        assert!((b - 0.3058).abs() < 1e-4);
        assert!(theoretical_bound(10.0, 0.1, &e3).is_err());
        let mut prev = 0.0;
        for eps in [1e-9, 1e-6, 1e-4, 1e-2, 0.05] {
            let v = theoretical_bound(10.0, eps, &e3).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn crossover_is_stationary() {
        let e = stability_exponents(1.0, 3).unwrap();
        let eps = 1e-4;
        let k = crossover_k(eps, &e).unwrap();
        let f = |k: f64| theoretical_bound(k, eps, &e).unwrap();
        let h = 1e-4 * k;
        assert!(((f(k + h) - f(k - h)) / (2.0 * h)).abs() < 1e-9);
        assert!(f(0.5 * k) > f(k) && f(2.0 * k) > f(k));
    }

    fn far(values: &[f64]) -> ScatteringDataset {
        ScatteringDataset::FarField {
            dim: 2,
            radius: 0.5,
            records: values
                .iter()
                .enumerate()
                .map(|(j, v)| FarFieldRecord {
                    kappa: 4.0 + j as f64,
                    pairs: vec![FarFieldPair { theta: vec![1.0, 0.0], d: vec![0.0, 1.0], value: Complex64::new(*v, -*v) }],
                })
                .collect(),
        }
    }

    #[test]
    fn far_discrepancy() {
        let band = FrequencyBand::new(2.0, 10.0, 3).unwrap();
        let a = far(&[1.0, 2.0]);
        assert_eq!(data_discrepancy(&a, &a, &band).unwrap(), 0.0);
        let b = far(&[1.5, 2.25]);
        // per-record |Δ|² = 2·0.5² and 2·0.25²
        assert!((data_discrepancy(&a, &b, &band).unwrap() - 0.5).abs() < 1e-15);
        let c = far(&[2.0, 2.5]);
        assert!((data_discrepancy(&a, &c, &band).unwrap() - 4.0 * 0.5).abs() < 1e-14);
        assert!(matches!(data_discrepancy(&a, &far(&[1.0]), &band), Err(Error::Alignment(_))));
    }

    #[test]
    fn near_discrepancy_uses_dtn_in_2d() {
        let (kappa, r, m) = (3.0, 0.5, 64);
        let pts = circle_points(r, m);
        let zero = vec![Complex64::new(0.0, 0.0); m];
        let rec = |dir: Vec<Complex64>| NearFieldRecord { kappa, d: vec![1.0, 0.0], points: pts.clone(), dirichlet: dir, neumann: zero.clone() };
        let h0 = crate::specialfn::hankel1(0, kappa * r).unwrap();
        let a = ScatteringDataset::NearField { dim: 2, radius: r, records: vec![rec(vec![h0; m])] };
        let b = ScatteringDataset::NearField { dim: 2, radius: r, records: vec![rec(zero.clone())] };
        let band = FrequencyBand::new(1.0, 4.0, 2).unwrap();
        let eps2 = data_discrepancy(&a, &b, &band).unwrap();
        // radial mode: ∂_ν = κ H0'/H0 times the trace
        let ratio = -kappa * crate::specialfn::hankel1(1, kappa * r).unwrap() / h0;
        let len = 2.0 * PI * r;
        let want = 2.0 * (kappa * kappa * h0.norm_sqr() * len + (ratio * h0).norm_sqr() * len);
        assert!((eps2 - want).abs() < 1e-10 * want);
    }

    #[test]
    fn report_csv() {
        let mut rep = StabilityReport {
            dim: 2,
            potential: "bump".into(),
            seed: 7,
            rows: vec![
                ReportRow { k: 8.0, epsilon: 1e-3, recon_error: 0.2, theoretical_bound: Some(0.5), crossover: false, runtime_s: 1.0 },
                ReportRow { k: 4.0, epsilon: 1e-3, recon_error: 0.3, theoretical_bound: None, crossover: false, runtime_s: 1.0 },
            ],
        };
        rep.finalize(&stability_exponents(1.0, 2).unwrap());
        assert_eq!(rep.rows[0].k, 4.0);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("K, epsilon"));
        assert!(text.contains("nan"));
    }
}
