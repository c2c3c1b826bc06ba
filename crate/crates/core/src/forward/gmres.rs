//! Restarted GMRES for complex non-Hermitian systems.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct GmresConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub restart: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-8, restart: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// ‖b − Ax‖/‖b‖ recomputed from the final iterate.
    pub residual: f64,
    pub converged: bool,
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let r = an.hypot(bn);
    let phase = a / an;
    (Complex64::new(an / r, 0.0), phase * b.conj() / r)
}

/// Solves A x = b starting from `x0`, where `apply` computes A v.
pub fn gmres<F>(apply: F, b: &[Complex64], x0: Vec<Complex64>, cfg: &GmresConfig) -> GmresResult
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return GmresResult { x: vec![Complex64::new(0.0, 0.0); n], iterations: 0, residual: 0.0, converged: true };
    }
    let mut x = x0;
    let mut iterations = 0;
    let m = cfg.restart.max(1).min(n);
    loop {
        let ax = apply(&x);
        let r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        let rel = beta / b_norm;
        if rel <= cfg.tol || iterations >= cfg.max_iter {
            return GmresResult { x, iterations, residual: rel, converged: rel <= cfg.tol };
        }

        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // column k of the Hessenberg matrix has k + 2 entries
        let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs = Vec::with_capacity(m);
        let mut sn = Vec::with_capacity(m);
        let mut g = vec![Complex64::new(0.0, 0.0); m + 1];
        g[0] = Complex64::new(beta, 0.0);

        let mut k = 0;
        while k < m && iterations < cfg.max_iter {
            iterations += 1;
            let mut w = apply(&basis[k]);
            let mut col = vec![Complex64::new(0.0, 0.0); k + 2];
            for j in 0..=k {
                let hj = dotc(&basis[j], &w);
                col[j] = hj;
                w.iter_mut().zip(&basis[j]).for_each(|(wi, vi)| *wi -= hj * vi);
            }
            let w_norm = norm(&w);
            col[k + 1] = Complex64::new(w_norm, 0.0);
            for j in 0..k {
                let (c, s): (Complex64, Complex64) = (cs[j], sn[j]);
                let t = c * col[j] + s * col[j + 1];
                col[j + 1] = -s.conj() * col[j] + c * col[j + 1];
                col[j] = t;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = Complex64::new(0.0, 0.0);
            g[k + 1] = -s.conj() * g[k];
            g[k] = c * g[k];
            cs.push(c);
            sn.push(s);
            h.push(col);
            k += 1;
            if w_norm == 0.0 || g[k].norm() / b_norm <= cfg.tol {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        let mut y = vec![Complex64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[i]).for_each(|(xv, v)| *xv += yi * v);
        }
    }
}
