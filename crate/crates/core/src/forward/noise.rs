use super::data::ScatteringDataset;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn rms<'a>(values: impl Iterator<Item = &'a Complex64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v.norm_sqr(), n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

fn perturb<'a>(values: impl Iterator<Item = &'a mut Complex64>, sigma: f64, rng: &mut ChaCha8Rng) {
    // circular Gaussian: E|n|² = σ², so each part has variance σ²/2
    let normal = Normal::new(0.0, sigma / std::f64::consts::SQRT_2).expect("finite sigma");
    for v in values {
        *v += Complex64::new(normal.sample(rng), normal.sample(rng));
    }
}

/// Adds circular complex Gaussian noise of standard deviation η·RMS.
///
/// Far-field values share one RMS; for near-field data the Dirichlet and
/// Neumann traces are scaled by their own RMS since they differ by a factor κ.
pub fn add_noise(dataset: &ScatteringDataset, eta: f64, seed: u64) -> Result<ScatteringDataset> {
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("noise level must be non-negative, got {eta}")));
    }
    let mut out = dataset.clone();
    if eta == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &mut out {
        ScatteringDataset::FarField { records, .. } => {
            let level = eta * rms(records.iter().flat_map(|r| r.pairs.iter().map(|p| &p.value)));
            perturb(records.iter_mut().flat_map(|r| r.pairs.iter_mut().map(|p| &mut p.value)), level, &mut rng);
        }
        ScatteringDataset::NearField { records, .. } => {
            let dl = eta * rms(records.iter().flat_map(|r| r.dirichlet.iter()));
            let nl = eta * rms(records.iter().flat_map(|r| r.neumann.iter()));
            perturb(records.iter_mut().flat_map(|r| r.dirichlet.iter_mut()), dl, &mut rng);
            perturb(records.iter_mut().flat_map(|r| r.neumann.iter_mut()), nl, &mut rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::data::{FarFieldPair, FarFieldRecord};

    fn dataset(n: usize) -> ScatteringDataset {
        let pairs = (0..n)
            .map(|i| FarFieldPair {
                theta: vec![1.0, 0.0],
                d: vec![0.0, 1.0],
                value: Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()),
            })
            .collect();
        ScatteringDataset::FarField { dim: 2, radius: 1.0, records: vec![FarFieldRecord { kappa: 3.0, pairs }] }
    }

    fn values(ds: &ScatteringDataset) -> Vec<Complex64> {
        match ds {
            ScatteringDataset::FarField { records, .. } => records[0].pairs.iter().map(|p| p.value).collect(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_level_is_identity() {
        let ds = dataset(10);
        assert_eq!(add_noise(&ds, 0.0, 9).unwrap(), ds);
        assert!(add_noise(&ds, -1.0, 9).is_err());
    }

    #[test]
    fn empirical_level_and_determinism() {
        let ds = dataset(20_000);
        let noisy = add_noise(&ds, 0.05, 42).unwrap();
        let clean = values(&ds);
        let v = values(&noisy);
        let pert = rms(v.iter().zip(&clean).map(|(a, b)| a - b).collect::<Vec<_>>().iter());
        let ratio = pert / rms(clean.iter());
        assert!((ratio / 0.05 - 1.0).abs() < 0.05, "ratio {ratio}");
        assert_eq!(add_noise(&ds, 0.05, 42).unwrap(), noisy);
        assert_ne!(add_noise(&ds, 0.05, 43).unwrap(), noisy);
    }
}
