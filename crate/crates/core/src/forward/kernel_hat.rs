//! Fourier transform of the outgoing kernel truncated to the ball |x| ≤ L.
//!
//! Convolving with G·1_{|x|≤L} on a torus of side ≥ L + 2R reproduces the
//! free-space convolution exactly for sources in B_R and targets within L − R
//! of the origin, so the transform can be sampled on the torus lattice with no
//! periodization error.

use crate::error::Result;
use crate::specialfn::{cylinder_bessel, hankel1};
use num_complex::Complex64;

// 8-point Gauss–Legendre rule on [−1, 1]
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Mean of g over [a, b] (a ≠ b or a = b) by 8-point Gauss–Legendre.
fn interval_mean(a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    0.5 * GL_NODES.iter().zip(GL_WEIGHTS).map(|(t, w)| w * g(mid + half * t)).sum::<f64>()
}

/// Ĝ_L(s) for the 3D kernel e^{iκr}/(4πr), s = |ξ|.
pub fn truncated_kernel_hat_3d(kappa: f64, len: f64, s: f64) -> Complex64 {
    let i = Complex64::i();
    let e = (i * kappa * len).exp();
    if s == 0.0 {
        return (-1.0 + e * Complex64::new(1.0, -kappa * len)) / (kappa * kappa);
    }
    if s < 0.5 * kappa {
        let num = -1.0 + e * Complex64::new((s * len).cos(), -(kappa / s) * (s * len).sin());
        return num / (kappa * kappa - s * s);
    }
    // factored form without cancellation near s = κ
    let sigma = s + kappa;
    let delta = s - kappa;
    let sinc_half = if delta == 0.0 { 0.5 * len } else { (0.5 * delta * len).sin() / delta };
    let (sh, ch) = (0.5 * sigma * len).sin_cos();
    let real_part = -2.0 * sh * sinc_half;
    let imag_part = -(2.0 * kappa * ch * sinc_half - (kappa * len).sin()) / s;
    e * Complex64::new(real_part, imag_part) / (-sigma)
}

/// Ĝ_L(s) for the 2D kernel (i/4)H_0^{(1)}(κr), s = |ξ|.
pub fn truncated_kernel_hat_2d(kappa: f64, len: f64, s: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let z = kappa * len;
    let h0 = hankel1(0, z)?;
    let h1 = hankel1(1, z)?;
    let pref = i * (std::f64::consts::PI / 2.0) * len;
    if (s - kappa).abs() * len < 1.0 {
        // N(s) − N(κ) through integrals of tJ0 and J1 between κL and sL
        let j0 = |t: f64| if t == 0.0 { 1.0 } else { cylinder_bessel(0, t).map(|v| v.0).unwrap_or(f64::NAN) };
        let j1 = |t: f64| if t == 0.0 { 0.0 } else { cylinder_bessel(1, t).map(|v| v.0).unwrap_or(f64::NAN) };
        let (a, b) = (z, s * len);
        let mean_tj0 = interval_mean(a, b, |t| t * j0(t));
        let mean_j1 = interval_mean(a, b, j1);
        // ∫_a^b g = (s − κ) L · mean(g); dividing by s² − κ² leaves L/(s + κ)
        let val = pref * len * (h0 * (mean_tj0 / len) + h1 * (kappa * mean_j1)) / (s + kappa);
        return Ok(val);
    }
    let (j0s, j1s) = if s == 0.0 {
        (1.0, 0.0)
    } else {
        let (j0, _) = cylinder_bessel(0, s * len)?;
        let (j1, _) = cylinder_bessel(1, s * len)?;
        (j0, j1)
    };
    let num = 1.0 + pref * (h0 * (s * j1s) - h1 * (kappa * j0s));
    Ok(num / (s * s - kappa * kappa))
}
