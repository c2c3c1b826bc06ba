//! 2D outgoing kernel at complex frequency through its Laplace-type integral.

use super::bessel::hankel1;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

const ABS_TOL: f64 = 1e-10;
const MAX_LEVEL: u32 = 12;

/// A frequency in the double sector |arg λ| ≤ π/4 or |arg λ − π| ≤ π/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    lambda: Complex64,
}

impl SectorPoint {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !Self::contains(lambda) {
            return Err(Error::Domain(format!(
                "lambda = {} + {}i lies outside the double sector",
                lambda.re, lambda.im
            )));
        }
        Ok(Self { lambda })
    }

    pub fn contains(lambda: Complex64) -> bool {
        if lambda.norm() == 0.0 || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return false;
        }
        // |Im| ≤ |Re| is exactly the union of the two closed sectors
        lambda.im.abs() <= lambda.re.abs() * (1.0 + 1e-15)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }
}

/// Integral ∫_0^∞ e^{-t} t^{-1/2} (t/2 − iz)^{-1/2} dt with z = λr, written as
/// 2∫_0^∞ e^{-u²} (u²/2 − iz)^{-1/2} du and integrated by exp-sinh quadrature.
fn sector_integral(z: Complex64) -> Result<Complex64> {
    let f = |u: f64| -> Complex64 {
        let u2 = u * u;
        if u2 > 740.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = Complex64::new(0.5 * u2, 0.0) - Complex64::i() * z;
        (-u2).exp() * 2.0 / w.sqrt()
    };
    // u = exp(π/2 sinh t), du = u (π/2) cosh t dt
    let t_max = 4.0;
    let node = |t: f64| -> Complex64 {
        let s = FRAC_PI_2 * t.sinh();
        let u = s.exp();
        if u == 0.0 || !u.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        f(u) * (u * FRAC_PI_2 * t.cosh())
    };
    let mut step = 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0i64;
    while (k as f64) * step <= t_max {
        let t = k as f64 * step;
        sum += node(t);
        if k > 0 {
            sum += node(-t);
        }
        k += 1;
    }
    let mut estimate = sum * step;
    let mut change = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        step *= 0.5;
        // new nodes are the odd multiples of the halved step
        let mut fresh = Complex64::new(0.0, 0.0);
        let mut k = 1i64;
        while (k as f64) * step <= t_max {
            let t = k as f64 * step;
            fresh += node(t) + node(-t);
            k += 2;
        }
        sum += fresh;
        let next = sum * step;
        change = (next - estimate).norm();
        estimate = next;
        if level >= 3 && change <= ABS_TOL * estimate.norm().max(1e-3) {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature { achieved: change, target: ABS_TOL })
}

/// Calibration constant of the integral representation, fixed once against
/// the real-axis value (i/4) H_0^{(1)}(1).
pub fn sector_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let h = hankel1(0, 1.0).expect("H0(1)");
        let target = Complex64::new(0.0, 0.25) * h;
        let integral = sector_integral(Complex64::new(1.0, 0.0)).expect("calibration integral");
        let raw = target / (Complex64::new(0.0, 1.0).exp() * integral);
        raw.re
    })
}

/// (i/4) H_0^{(1)}(λ r) continued to the double sector, principal square root.
pub fn hankel0_sector(lambda: SectorPoint, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let z = lambda.lambda() * r;
    let integral = sector_integral(z)?;
    Ok((Complex64::i() * z).exp() * integral * sector_constant())
}

/// Reference value √2/(4π) of the calibration constant.
pub const SECTOR_CONSTANT_CLOSED_FORM: f64 = std::f64::consts::SQRT_2 / (4.0 * PI);

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel_real(k: f64, r: f64) -> Complex64 {
        Complex64::new(0.0, 0.25) * hankel1(0, k * r).unwrap()
    }

    #[test]
    fn membership() {
        assert!(SectorPoint::contains(Complex64::new(1.0, 0.0)));
        assert!(SectorPoint::contains(Complex64::new(1.0, 1.0)));
        assert!(SectorPoint::contains(Complex64::new(-2.0, 1.5)));
        assert!(!SectorPoint::contains(Complex64::new(0.0, 0.0)));
        assert!(!SectorPoint::contains(Complex64::new(1.0, 1.1)));
        assert!(!SectorPoint::contains(Complex64::new(0.0, 1.0)));
        assert!(SectorPoint::new(Complex64::new(0.1, -0.3)).is_err());
    }

    #[test]
    fn unit_value() {
        let v = hankel0_sector(SectorPoint::new(Complex64::new(1.0, 0.0)).unwrap(), 1.0).unwrap();
        assert!((v - Complex64::new(-0.0220642, 0.1912994)).norm() < 1e-7);
    }

    #[test]
    fn calibrated_constant_matches_closed_form() {
        assert!((sector_constant() - SECTOR_CONSTANT_CLOSED_FORM).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_real_axis_kernel() {
        for &k in &[1.0, 2.5, 7.0, 13.0, 29.0, 50.0] {
            for &r in &[0.1, 0.35, 1.0, 2.2, 5.0] {
                let s = hankel0_sector(SectorPoint::new(Complex64::new(k, 0.0)).unwrap(), r).unwrap();
                let h = kernel_real(k, r);
                assert!((s - h).norm() <= 1e-8 * h.norm(), "k={k} r={r}: {s} vs {h}");
            }
        }
    }

    #[test]
    fn complex_frequency_values() {
        // (λ, r, Re, Im) of (i/4) H0(λ r) at 40 digits
        let cases = [
            (Complex64::new(1.0, 0.3), 1.0, 0.0017859696467780162, 0.13729287013526366),
            (Complex64::new(2.0, -0.5), 0.7, -0.14293732503859242, 0.18598904838400946),
            (Complex64::new(10.0, 1.0), 0.3, -0.071614429305320642, -0.044460187227082138),
            (Complex64::new(0.5, 0.5), 2.0, 0.012763864668272405, 0.056862473700573689),
            (Complex64::new(30.0, -7.0), 0.2, 0.27040115932289015, 0.18364344117927884),
        ];
        for (lam, r, re, im) in cases {
            let v = hankel0_sector(SectorPoint::new(lam).unwrap(), r).unwrap();
            let want = Complex64::new(re, im);
            assert!((v - want).norm() <= 1e-8 * want.norm(), "{lam} {r}: {v} vs {want}");
        }
    }

    #[test]
    fn decays_in_upper_half_plane() {
        let lam = SectorPoint::new(Complex64::new(3.0, 1.0)).unwrap();
        let oracle = [
            (5.0, Complex64::new(-0.00033570977064679986, 3.05605835835373e-5)),
            (10.0, Complex64::new(1.1261471462798613e-6, -1.1482479369327743e-6)),
            (20.0, Complex64::new(-3.0787889441992776e-11, -4.1489824121829478e-11)),
        ];
        let mut ratios = Vec::new();
        for (r, want) in oracle {
            let v = hankel0_sector(lam, r).unwrap();
            assert!((v - want).norm() <= 1e-8 * want.norm());
            ratios.push(v.norm() / ((-r).exp() / (lam.lambda().norm() * r).sqrt()));
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 1.2, "{ratios:?}");
    }

    #[test]
    fn reflection_gives_conjugates() {
        for lam in [Complex64::new(4.0, 0.5), Complex64::new(4.0, -0.5), Complex64::new(9.0, 0.0)] {
            let a = hankel0_sector(SectorPoint::new(lam).unwrap(), 0.8).unwrap();
            let b = hankel0_sector(SectorPoint::new(-lam.conj()).unwrap(), 0.8).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm());
        }
    }
}
