//! Integer-order cylinder Bessel functions of real argument.
//!
//! J0, J1, Y0, Y1 come from the ascending series below x = 12 and from the
//! Hankel asymptotic expansion above. Higher orders use upward recurrence for
//! Y (always stable), upward recurrence for J when n < x, and Miller's
//! backward recurrence for J otherwise.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;
pub const MAX_ORDER: u32 = 200;

/// Returns `(J_n(x), Y_n(x))`. `Y_n` is `-inf` once it overflows.
pub fn cylinder_bessel(n: u32, x: f64) -> Result<(f64, f64)> {
    if n > MAX_ORDER {
        return Err(Error::OrderOverflow(n));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive, got {x}")));
    }
    let (j0, j1, y0, y1) = low_orders(x);
    match n {
        0 => Ok((j0, y0)),
        1 => Ok((j1, y1)),
        _ => {
            let j = if x > n as f64 { j_upward(n, x, j0, j1) } else { j_miller(n, x) };
            Ok((j, y_upward(n, x, y0, y1)))
        }
    }
}

/// H_n^{(1)}(x) = J_n(x) + i Y_n(x).
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    let (j, y) = cylinder_bessel(n, x)?;
    Ok(Complex64::new(j, y))
}

/// Derivative of H_n^{(1)} at x.
pub fn hankel1_derivative(n: u32, x: f64) -> Result<Complex64> {
    if n == 0 {
        return Ok(-hankel1(1, x)?);
    }
    // H_n' = H_{n-1} - (n/x) H_n
    Ok(hankel1(n - 1, x)? - hankel1(n, x)? * (n as f64 / x))
}

fn low_orders(x: f64) -> (f64, f64, f64, f64) {
    if x < SERIES_LIMIT {
        series_low(x)
    } else {
        let (j0, y0) = asymptotic(0, x);
        let (j1, y1) = asymptotic(1, x);
        (j0, j1, y0, y1)
    }
}

fn series_low(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    let log_term = (half.ln() + EULER_GAMMA) * 2.0 / PI;

    // J0 and the harmonic-number series of Y0
    let mut term = 1.0;
    let mut j0 = 1.0;
    let mut y0_sum = 0.0;
    let mut harmonic = 0.0;
    let mut k = 1u32;
    loop {
        term *= -q / (k as f64 * k as f64);
        harmonic += 1.0 / k as f64;
        j0 += term;
        y0_sum -= harmonic * term;
        if term.abs() < 1e-18 * j0.abs().max(1e-300) && k > 2 {
            break;
        }
        k += 1;
        if k > 200 {
            break;
        }
    }
    let y0 = log_term * j0 + 2.0 / PI * y0_sum;

    // J1 and the digamma series of Y1
    let mut term = half;
    let mut j1 = half;
    let mut psi_sum = (1.0 - 2.0 * EULER_GAMMA) * half; // (psi(1)+psi(2)) (x/2)
    let mut h_k = 0.0;
    let mut k = 1u32;
    loop {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        h_k += 1.0 / kf;
        let h_k1 = h_k + 1.0 / (kf + 1.0);
        j1 += term;
        psi_sum += (h_k + h_k1 - 2.0 * EULER_GAMMA) * term;
        if term.abs() < 1e-18 * j1.abs().max(1e-300) && k > 2 {
            break;
        }
        k += 1;
        if k > 200 {
            break;
        }
    }
    let y1 = -2.0 / (PI * x) + 2.0 / PI * half.ln() * j1 - psi_sum / PI;
    (j0, j1, y0, y1)
}

/// Hankel asymptotic expansion for order 0 or 1, summed to its smallest term.
fn asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..80u32 {
        let kf = k as f64;
        let next = term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() >= last || next.abs() < 1e-17 {
            break;
        }
        last = next.abs();
        term = next;
        // a_k / x^k with alternating signs split between P (even k) and Q (odd k)
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

fn j_upward(n: u32, x: f64, j0: f64, j1: f64) -> f64 {
    let (mut prev, mut cur) = (j0, j1);
    for k in 1..n {
        let next = 2.0 * k as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn j_miller(n: u32, x: f64) -> f64 {
    const BIG: f64 = 1e250;
    const SMALL: f64 = 1e-250;
    let tox = 2.0 / x;
    let start = 2 * ((n + (160.0 * n as f64).sqrt() as u32) / 2) + 2;
    let mut even = false;
    let mut bjp = 0.0;
    let mut bj = 1.0;
    let mut sum = 0.0;
    let mut ans = 0.0;
    for j in (1..=start).rev() {
        let bjm = j as f64 * tox * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > BIG {
            bj *= SMALL;
            bjp *= SMALL;
            ans *= SMALL;
            sum *= SMALL;
        }
        if even {
            sum += bj;
        }
        even = !even;
        if j == n {
            ans = bjp;
        }
    }
    sum = 2.0 * sum - bj;
    ans / sum
}

fn y_upward(n: u32, x: f64, y0: f64, y1: f64) -> f64 {
    let (mut prev, mut cur) = (y0, y1);
    for k in 1..n {
        let next = 2.0 * k as f64 / x * cur - prev;
        if !next.is_finite() {
            return f64::NEG_INFINITY;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    // (n, x, J, Y) evaluated with 40-digit arithmetic before the build
    const ORACLE: &[(u32, f64, f64, f64)] = &[
        (0, 1.0, 7.6519768655796655e-1, 8.8256964215676958e-2),
        (1, 1.0, 4.4005058574493352e-1, -7.8121282130028872e-1),
        (0, 0.01, 9.9997500015624957e-1, -3.0054556370836459),
        (1, 0.05, 2.4992188313759701e-2, -1.278985517117497e+1),
        (0, 11.9, 2.5049441699589645e-2, -2.2983321394337506e-1),
        (0, 12.1, 6.9666773606807312e-2, -2.1843838055092549e-1),
        (1, 12.5, -1.6548380461475972e-1, -1.5383825653750118e-1),
        (2, 3.0, 4.8609126058589108e-1, -1.6040039348492373e-1),
        (5, 1.0, 2.4975773021123443e-4, -2.6040586662581222e+2),
        (10, 0.5, 2.6131773608228031e-13, -1.2196362334956963e+11),
        (30, 10.0, 1.551096078257467e-12, -7.2561423161003306e+9),
        (50, 60.0, -1.3798273148535212e-1, 8.6417699626744903e-3),
        (0, 100.0, 1.9985850304223122e-2, -7.7244313365083152e-2),
        (1, 100.0, -7.7145352014112158e-2, -2.0372312002759793e-2),
        (3, 250.0, 4.3680353948217495e-2, -2.527219888343898e-2),
        (0, 1000.0, 2.4786686152420175e-2, 4.7159179776228134e-3),
        (7, 1000.0, -5.3217830764436154e-3, 2.4664020665858935e-2),
        (200, 150.0, 8.0577021983968538e-14, -2.9864935180406554e+10),
        (200, 300.0, -1.9369872600834379e-2, -4.971714175183806e-2),
        (100, 1.0, 8.4318287896267085e-189, -3.7752878101105284e+185),
        (20, 20.0, 1.6474777377532653e-1, -2.8548945860020349e-1),
        (1, 7.3, 8.2570430493257831e-2, -2.8459437186807211e-1),
    ];

    #[test]
    fn matches_high_precision_values() {
        for &(n, x, j, y) in ORACLE {
            let (jc, yc) = cylinder_bessel(n, x).unwrap();
            let scale = (j * j + y * y).sqrt();
            // ten digits relative to the local amplitude sqrt(J^2+Y^2)
            assert!((jc - j).abs() <= 1e-10 * scale.max(j.abs()), "J_{n}({x}): {jc} vs {j}");
            assert!((yc - y).abs() <= 1e-10 * y.abs().max(scale), "Y_{n}({x}): {yc} vs {y}");
            if j.abs() > 1e-3 * scale || x <= n as f64 {
                assert!((jc - j).abs() <= 1e-10 * j.abs(), "J_{n}({x}) relative: {jc} vs {j}");
            }
        }
    }

    #[test]
    fn small_argument_limit() {
        let (j, _) = cylinder_bessel(0, 1e-8).unwrap();
        assert!((j - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wronskian_on_log_grid() {
        for n in [0u32, 1, 2, 5, 17, 60, 150, 200] {
            for i in 0..=50 {
                let x = 10f64.powf(-2.0 + 5.0 * i as f64 / 50.0);
                let (jn, yn) = cylinder_bessel(n, x).unwrap();
                let (jp, yp) = if n == 0 {
                    let (j1, y1) = cylinder_bessel(1, x).unwrap();
                    (-j1, -y1)
                } else {
                    let (jm, ym) = cylinder_bessel(n - 1, x).unwrap();
                    (jm - n as f64 / x * jn, ym - n as f64 / x * yn)
                };
                if !yn.is_finite() || !yp.is_finite() {
                    continue;
                }
                let w = jn * yp - jp * yn;
                let target = 2.0 / (PI * x);
                assert!(
                    (w - target).abs() <= 1e-10 * target,
                    "n={n} x={x}: {w} vs {target}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(cylinder_bessel(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(cylinder_bessel(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(cylinder_bessel(201, 1.0), Err(Error::OrderOverflow(201))));
    }

    #[test]
    fn hankel_derivative_matches_difference() {
        for n in [0u32, 1, 4] {
            let x = 3.7;
            let h = 1e-5;
            let fd = (hankel1(n, x + h).unwrap() - hankel1(n, x - h).unwrap()) / (2.0 * h);
            let d = hankel1_derivative(n, x).unwrap();
            assert!((fd - d).norm() < 1e-8 * d.norm());
        }
    }
}
