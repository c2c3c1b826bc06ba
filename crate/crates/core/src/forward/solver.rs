use super::gmres::{gmres, GmresConfig};
use super::kernel_hat::{truncated_kernel_hat_2d, truncated_kernel_hat_3d};
use crate::error::{Error, Result};
use crate::fields::spectral::NdFft;
use crate::fields::{ComplexField, Grid, ScalarField, VectorField};
use crate::specialfn::{green_kernel, green_kernel_gradient};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest admissible κh (eight points per wavelength).
pub const RESOLUTION_LIMIT: f64 = PI / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Equal-weight grid sums with the truncated-kernel transform.
    TruncatedKernel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub krylov_tol: f64,
    pub max_iterations: usize,
    pub restart: usize,
    /// Torus side over box side, per axis.
    pub torus_factor: usize,
    pub quadrature: QuadratureRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            krylov_tol: 1e-8,
            max_iterations: 500,
            restart: 50,
            torus_factor: 2,
            quadrature: QuadratureRule::TruncatedKernel,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.krylov_tol > 0.0 && self.krylov_tol < 1.0) {
            return Err(Error::Domain(format!("krylov_tol must lie in (0, 1), got {}", self.krylov_tol)));
        }
        if self.torus_factor < 2 {
            return Err(Error::Domain(format!("torus_factor must be ≥ 2, got {}", self.torus_factor)));
        }
        if self.max_iterations == 0 || self.restart == 0 {
            return Err(Error::Domain("max_iterations and restart must be positive".into()));
        }
        Ok(())
    }
}

/// Incident plane wave e^{iκ x·d}.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave {
    kappa: f64,
    direction: Vec<f64>,
}

impl PlaneWave {
    pub fn new(kappa: f64, direction: Vec<f64>) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
        }
        let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("direction has norm {n}, expected 1")));
        }
        Ok(Self { kappa, direction })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn sample(&self, grid: &Grid) -> Vec<Complex64> {
        (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                let phase: f64 = self.direction.iter().zip(p.iter()).map(|(d, x)| d * x).sum();
                Complex64::from_polar(1.0, self.kappa * phase)
            })
            .collect()
    }
}

/// Which far-field normalization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFieldConvention {
    /// c_dim ∫ e^{−iκθ·y} V u dy, c_3 = 1/(4π), c_2 = 1.
    Scalar,
    /// −∫ e^{−iκθ·y} (W u)(y) dy for the magnetic operator.
    Magnetic,
}

#[derive(Debug, Clone)]
pub struct TotalField {
    pub field: ComplexField,
    pub iterations: usize,
    pub residual: f64,
    /// Set when one application of the integral operator does not shrink the
    /// incident wave, i.e. the magnetic perturbation is not small.
    pub contraction_warning: Option<String>,
}

struct MagneticTerms {
    b: [Vec<f64>; 3],
    div_b: Vec<f64>,
}

/// Lippmann–Schwinger solver u + G_κ * (W u) = u_inc at one wavenumber.
pub struct ForwardSolver {
    grid: Grid,
    kappa: f64,
    support: f64,
    truncation: f64,
    mask: Vec<bool>,
    // V, or |b|² + V in the magnetic case
    potential: Vec<f64>,
    magnetic: Option<MagneticTerms>,
    torus_n: usize,
    kernel_hat: Vec<Complex64>,
    torus_fft: NdFft,
    box_fft: NdFft,
    cfg: SolverConfig,
}

impl ForwardSolver {
    pub fn new(v: &ScalarField, b: Option<&VectorField>, kappa: f64, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = *v.grid();
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
        }
        let kappa_h = kappa * grid.spacing();
        if kappa_h > RESOLUTION_LIMIT * (1.0 + 1e-12) {
            return Err(Error::Resolution { kappa_h, limit: RESOLUTION_LIMIT });
        }
        let mut support = v.class().r;
        let mut potential = v.values().to_vec();
        let magnetic = match b {
            None => None,
            Some(b) => {
                grid.check_same(b.grid())?;
                if grid.dim() != 3 {
                    return Err(Error::Domain("magnetic potentials require dim = 3".into()));
                }
                support = support.max(b.class().r);
                for (p, m) in potential.iter_mut().zip(b.squared_magnitude()) {
                    *p += m;
                }
                Some(MagneticTerms { b: b.components().clone(), div_b: b.divergence() })
            }
        };
        if support > grid.half_width() {
            return Err(Error::Domain("support radius exceeds the box".into()));
        }
        let mask: Vec<bool> = (0..grid.len()).map(|i| grid.radius(i) <= support).collect();
        let truncation = support + grid.half_width();
        let torus_n = cfg.torus_factor * grid.points_per_axis();
        let torus_grid = Grid::new(grid.dim(), 0.5 * torus_n as f64 * grid.spacing(), torus_n)?;
        let mut kernel_hat = Vec::with_capacity(torus_grid.len());
        for i in 0..torus_grid.len() {
            let xi = torus_grid.wavevector(i);
            let s = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            kernel_hat.push(match grid.dim() {
                3 => truncated_kernel_hat_3d(kappa, truncation, s),
                _ => truncated_kernel_hat_2d(kappa, truncation, s)?,
            });
        }
        Ok(Self {
            grid,
            kappa,
            support,
            truncation,
            mask,
            potential,
            magnetic,
            torus_n,
            kernel_hat,
            torus_fft: NdFft::new(&torus_grid.shape()),
            box_fft: NdFft::new(&grid.shape()),
            cfg: *cfg,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn truncation_length(&self) -> f64 {
        self.truncation
    }

    pub fn convention(&self) -> FarFieldConvention {
        if self.magnetic.is_some() {
            FarFieldConvention::Magnetic
        } else {
            FarFieldConvention::Scalar
        }
    }

    /// (W u)(x) restricted to the support ball.
    pub fn apply_potential(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut f: Vec<Complex64> = u.iter().zip(&self.potential).map(|(ui, q)| ui * q).collect();
        if let Some(m) = &self.magnetic {
            // −2i b·∇u − i(∇·b)u written as −2i ∇·(b u) + i(∇·b)u so that
            // only the compactly supported product b u is differentiated
            let flux: Vec<Vec<Complex64>> = m.b.iter().map(|c| c.iter().zip(u).map(|(bc, ui)| ui * bc).collect()).collect();
            let div = crate::fields::spectral_divergence_with(&self.box_fft, &self.grid, &flux);
            let i = Complex64::i();
            for k in 0..f.len() {
                f[k] += -2.0 * i * div[k] + i * m.div_b[k] * u[k];
            }
        }
        for (fk, &inside) in f.iter_mut().zip(&self.mask) {
            if !inside {
                *fk = Complex64::new(0.0, 0.0);
            }
        }
        f
    }

    /// (G_κ * f)(x_j) on the box grid for f supported in the ball.
    pub fn convolve(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.points_per_axis();
        let m = self.torus_n;
        let dim = self.grid.dim();
        let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(dim as u32)];
        self.scatter_to_torus(f, &mut buf);
        self.torus_fft.forward(&mut buf);
        buf.iter_mut().zip(&self.kernel_hat).for_each(|(b, k)| *b *= k);
        self.torus_fft.inverse(&mut buf);
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        let mut flat = 0;
        if dim == 2 {
            for i in 0..n {
                out[flat..flat + n].copy_from_slice(&buf[i * m..i * m + n]);
                flat += n;
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let src = (i * m + j) * m;
                    out[flat..flat + n].copy_from_slice(&buf[src..src + n]);
                    flat += n;
                }
            }
        }
        out
    }

    fn scatter_to_torus(&self, f: &[Complex64], buf: &mut [Complex64]) {
        let n = self.grid.points_per_axis();
        let m = self.torus_n;
        if self.grid.dim() == 2 {
            for i in 0..n {
                buf[i * m..i * m + n].copy_from_slice(&f[i * n..(i + 1) * n]);
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let dst = (i * m + j) * m;
                    let src = (i * n + j) * n;
                    buf[dst..dst + n].copy_from_slice(&f[src..src + n]);
                }
            }
        }
    }

    /// u ↦ u + G_κ * (W u).
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let g = self.convolve(&self.apply_potential(u));
        u.iter().zip(g).map(|(a, b)| a + b).collect()
    }

    /// Spatial torus kernel whose circular convolution `convolve` applies,
    /// indexed on the torus lattice (points per axis = `torus_points_per_axis`).
    pub fn kernel_table(&self) -> Vec<Complex64> {
        let mut t = self.kernel_hat.clone();
        self.torus_fft.inverse(&mut t);
        t
    }

    pub fn torus_points_per_axis(&self) -> usize {
        self.torus_n
    }

    pub fn solve(&self, wave: &PlaneWave) -> Result<TotalField> {
        if (wave.kappa() - self.kappa).abs() > 1e-12 * self.kappa {
            return Err(Error::Domain(format!(
                "wave at κ = {} given to a solver built for κ = {}",
                wave.kappa(),
                self.kappa
            )));
        }
        if wave.direction().len() != self.grid.dim() {
            return Err(Error::Shape("direction dimension differs from grid dimension".into()));
        }
        let rhs = wave.sample(&self.grid);
        let contraction_warning = if self.magnetic.is_some() {
            let ku = self.convolve(&self.apply_potential(&rhs));
            let ratio = (ku.iter().map(|v| v.norm_sqr()).sum::<f64>() / rhs.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
            (ratio >= 1.0).then(|| format!("integral operator amplifies the incident wave by {ratio:.3}; perturbation is not small"))
        } else {
            None
        };
        let (values, iterations, residual) = self.solve_rhs(&rhs)?;
        Ok(TotalField { field: ComplexField::new(self.grid, values)?, iterations, residual, contraction_warning })
    }

    /// Solves (I + G W) u = rhs.
    pub fn solve_rhs(&self, rhs: &[Complex64]) -> Result<(Vec<Complex64>, usize, f64)> {
        let cfg = GmresConfig { max_iter: self.cfg.max_iterations, tol: self.cfg.krylov_tol, restart: self.cfg.restart };
        let res = gmres(|v| self.apply(v), rhs, rhs.to_vec(), &cfg);
        if !res.converged {
            return Err(Error::Solver { iterations: res.iterations, residual: res.residual });
        }
        Ok((res.x, res.iterations, res.residual))
    }

    /// First Born approximation u_inc − G * (W u_inc).
    pub fn born_field(&self, wave: &PlaneWave) -> Vec<Complex64> {
        let inc = wave.sample(&self.grid);
        let g = self.convolve(&self.apply_potential(&inc));
        inc.iter().zip(g).map(|(a, b)| a - b).collect()
    }

    /// Far-field pattern at each observation direction.
    pub fn far_field(&self, u: &ComplexField, thetas: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.grid.check_same(&u.grid)?;
        if let Some(m) = &self.magnetic {
            return self.magnetic_far_field(m, &u.values, thetas);
        }
        let f = self.apply_potential(&u.values);
        let pref = match (self.convention(), self.grid.dim()) {
            (FarFieldConvention::Magnetic, _) => -1.0,
            (FarFieldConvention::Scalar, 3) => 1.0 / (4.0 * PI),
            (FarFieldConvention::Scalar, _) => 1.0,
        };
        let support: Vec<usize> = (0..self.grid.len()).filter(|&i| self.mask[i] && f[i] != Complex64::new(0.0, 0.0)).collect();
        let hd = self.grid.cell_volume();
        thetas
            .iter()
            .map(|theta| {
                if theta.len() != self.grid.dim() {
                    return Err(Error::Shape("observation direction has the wrong dimension".into()));
                }
                let n = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!("observation direction has norm {n}")));
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for &i in &support {
                    let p = self.grid.point(i);
                    let phase: f64 = theta.iter().zip(p.iter()).map(|(t, x)| t * x).sum();
                    acc += f[i] * Complex64::from_polar(1.0, -self.kappa * phase);
                }
                Ok(acc * (hd * pref))
            })
            .collect()
    }

    // −∫ e^{−iκθ·y} W u with the divergence moved onto the exponential:
    // ∫ e (−2i ∇·(b u)) = 2κ ∫ e θ·(b u). A spectral derivative would act on
    // the plane wave, which is not periodic on the box.
    fn magnetic_far_field(&self, m: &MagneticTerms, u: &[Complex64], thetas: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        let i = Complex64::i();
        let support: Vec<usize> = (0..self.grid.len()).filter(|&k| self.mask[k]).collect();
        let scalar: Vec<Complex64> = support.iter().map(|&k| u[k] * (self.potential[k] + i * m.div_b[k])).collect();
        let hd = self.grid.cell_volume();
        thetas
            .iter()
            .map(|theta| {
                if theta.len() != 3 {
                    return Err(Error::Shape("observation direction has the wrong dimension".into()));
                }
                let n = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!("observation direction has norm {n}")));
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &k) in support.iter().enumerate() {
                    let p = self.grid.point(k);
                    let phase = theta[0] * p[0] + theta[1] * p[1] + theta[2] * p[2];
                    let tb = theta[0] * m.b[0][k] + theta[1] * m.b[1][k] + theta[2] * m.b[2][k];
                    acc += (scalar[j] + 2.0 * self.kappa * tb * u[k]) * Complex64::from_polar(1.0, -self.kappa * phase);
                }
                Ok(-acc * hd)
            })
            .collect()
    }

    // (y, (|b|² + V + i∇·b) u, b u) at every support node
    fn magnetic_sources(&self, m: &MagneticTerms, u: &[Complex64]) -> Vec<([f64; 3], Complex64, [Complex64; 3])> {
        let i = Complex64::i();
        (0..self.grid.len())
            .filter(|&k| self.mask[k])
            .map(|k| {
                let s = u[k] * (self.potential[k] + i * m.div_b[k]);
                (self.grid.point(k), s, [u[k] * m.b[0][k], u[k] * m.b[1][k], u[k] * m.b[2][k]])
            })
            .collect()
    }

    // u^s(x) = −∫ G s + 2i ∫ ∇_x G · (b u), the divergence moved onto the kernel
    fn magnetic_traces(
        &self,
        m: &MagneticTerms,
        u: &[Complex64],
        points: &[Vec<f64>],
        radius: f64,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let sources = self.magnetic_sources(m, u);
        let hd = self.grid.cell_volume();
        let i = Complex64::i();
        let mut dirichlet = Vec::with_capacity(points.len());
        let mut neumann = Vec::with_capacity(points.len());
        for x in points {
            if x.len() != 3 {
                return Err(Error::Shape("boundary point has the wrong dimension".into()));
            }
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if (r - radius).abs() > 1e-12 * radius.max(1.0) {
                return Err(Error::Domain(format!("boundary point at |x| = {r}, expected {radius}")));
            }
            let normal = [x[0] / r, x[1] / r, x[2] / r];
            let mut val = Complex64::new(0.0, 0.0);
            let mut dn = Complex64::new(0.0, 0.0);
            for (p, s, flux) in &sources {
                let (g, grad, hess) = kernel_derivatives_3d(self.kappa, x, p)?;
                val += -g * s + 2.0 * i * (grad[0] * flux[0] + grad[1] * flux[1] + grad[2] * flux[2]);
                for a in 0..3 {
                    dn += -grad[a] * normal[a] * s;
                    for c in 0..3 {
                        dn += 2.0 * i * normal[a] * hess[a][c] * flux[c];
                    }
                }
            }
            dirichlet.push(val * hd);
            neumann.push(dn * hd);
        }
        Ok((dirichlet, neumann))
    }

    /// Scattered-field Dirichlet and Neumann traces at the given points on
    /// the sphere |x| = radius, via u^s(x) = −Σ_y G(x − y)(W u)(y) h^dim.
    pub fn traces(&self, u: &ComplexField, points: &[Vec<f64>], radius: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.grid.check_same(&u.grid)?;
        if let Some(m) = &self.magnetic {
            return self.magnetic_traces(m, &u.values, points, radius);
        }
        let f = self.apply_potential(&u.values);
        let sources: Vec<usize> = (0..self.grid.len()).filter(|&i| f[i] != Complex64::new(0.0, 0.0)).collect();
        let hd = self.grid.cell_volume();
        let dim = self.grid.dim();
        let kc = Complex64::new(self.kappa, 0.0);
        let mut dirichlet = Vec::with_capacity(points.len());
        let mut neumann = Vec::with_capacity(points.len());
        for x in points {
            if x.len() != dim {
                return Err(Error::Shape("boundary point has the wrong dimension".into()));
            }
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (r - radius).abs() > 1e-12 * radius.max(1.0) {
                return Err(Error::Domain(format!("boundary point at |x| = {r}, expected {radius}")));
            }
            let normal: Vec<f64> = x.iter().map(|v| v / r).collect();
            let mut val = Complex64::new(0.0, 0.0);
            let mut dn = Complex64::new(0.0, 0.0);
            for &j in &sources {
                let p = self.grid.point(j);
                let y = &p[..dim];
                let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                val += green_kernel(dim, kc, dist)? * f[j];
                let grad = green_kernel_gradient(self.kappa, x, y)?;
                let gn: Complex64 = grad.iter().zip(&normal).map(|(g, nv)| g * nv).sum();
                dn += gn * f[j];
            }
            dirichlet.push(-val * hd);
            neumann.push(-dn * hd);
        }
        Ok((dirichlet, neumann))
    }

    /// u^s(x) = −Σ_y G(x − y)(W u)(y) h^dim at arbitrary points off the grid nodes.
    pub fn represent(&self, u: &ComplexField, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.grid.check_same(&u.grid)?;
        if let Some(m) = &self.magnetic {
            let sources = self.magnetic_sources(m, &u.values);
            let hd = self.grid.cell_volume();
            return points
                .iter()
                .map(|x| {
                    let mut val = Complex64::new(0.0, 0.0);
                    for (p, s, flux) in &sources {
                        let (g, grad, _) = kernel_derivatives_3d(self.kappa, x, p)?;
                        val += -g * s + 2.0 * Complex64::i() * (grad[0] * flux[0] + grad[1] * flux[1] + grad[2] * flux[2]);
                    }
                    Ok(val * hd)
                })
                .collect();
        }
        let f = self.apply_potential(&u.values);
        let hd = self.grid.cell_volume();
        let dim = self.grid.dim();
        let kc = Complex64::new(self.kappa, 0.0);
        points
            .iter()
            .map(|x| {
                let mut val = Complex64::new(0.0, 0.0);
                for j in 0..self.grid.len() {
                    if f[j] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let p = self.grid.point(j);
                    let dist = x.iter().zip(&p[..dim]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    val += green_kernel(dim, kc, dist)? * f[j];
                }
                Ok(-val * hd)
            })
            .collect()
    }
}

// G, ∇_x G and the Hessian of e^{iκr}/(4πr) at r = |x − y|.
#[allow(clippy::type_complexity)]
fn kernel_derivatives_3d(kappa: f64, x: &[f64], y: &[f64; 3]) -> Result<(Complex64, [Complex64; 3], [[Complex64; 3]; 3])> {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return Err(Error::Singularity("coincident points".into()));
    }
    let ikr = Complex64::new(0.0, kappa * r);
    let g = ikr.exp() / (4.0 * PI * r);
    // g' and g'' of the radial profile
    let g1 = g * (ikr - 1.0) / r;
    let g2 = g * (2.0 - 2.0 * ikr - kappa * kappa * r * r) / (r * r);
    let e = [d[0] / r, d[1] / r, d[2] / r];
    let mut hess = [[Complex64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for c in 0..3 {
            let delta = if a == c { 1.0 } else { 0.0 };
            hess[a][c] = g2 * e[a] * e[c] + g1 / r * (delta - e[a] * e[c]);
        }
    }
    Ok((g, [g1 * e[0], g1 * e[1], g1 * e[2]], hess))
}
