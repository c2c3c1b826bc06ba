use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Uniform cell-corner grid on the box [−R′, R′]^dim with N points per axis.
///
/// Point j on an axis sits at −R′ + j·h, h = 2R′/N. Samples are stored in
/// row-major order with axis 0 (x) slowest and the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    n: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Domain(format!("grid dimension must be 2 or 3, got {dim}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::Domain(format!("points per axis must be even and ≥ 2, got {n}")));
        }
        Ok(Self { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.dim]
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Multi-index of a flat position.
    pub fn index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinates of a flat position; unused trailing entries are 0.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.index(flat);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord(idx[a]);
        }
        p
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let p = self.point(flat);
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    }

    /// Spacing π/R′ of the dual frequency lattice.
    pub fn dual_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Signed lattice index of transform position m (Nyquist maps to −N/2).
    pub fn signed_index(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Transform position of a signed lattice index, if it lies on the lattice.
    pub fn unsigned_index(&self, k: i64) -> Option<usize> {
        let n = self.n as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    /// Frequency vector of a flat transform position.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.index(flat);
        let dxi = self.dual_spacing();
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.signed_index(idx[a]) as f64 * dxi;
        }
        xi
    }

    /// Wavevector used for spectral differentiation: the Nyquist component is
    /// zeroed so that derivatives of real fields stay real.
    pub fn derivative_wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.index(flat);
        let dxi = self.dual_spacing();
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            let k = self.signed_index(idx[a]);
            xi[a] = if k == -(self.n as i64) / 2 { 0.0 } else { k as f64 * dxi };
        }
        xi
    }

    /// Flat position of the mirrored frequency −ξ.
    pub fn mirror(&self, flat: usize) -> usize {
        let idx = self.index(flat);
        let mut m = [0usize; 3];
        for a in 0..self.dim {
            m[a] = (self.n - idx[a]) % self.n;
        }
        self.flat(&m[..self.dim])
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!("grid {self:?} differs from {other:?}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::new(2, 1.0, 7).is_err());
        assert!(Grid::new(4, 1.0, 8).is_err());
        assert!(Grid::new(3, 0.0, 8).is_err());
        let g = Grid::new(3, 1.0, 8).unwrap();
        assert_eq!(g.len(), 512);
        assert!((g.spacing() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn flat_index_round_trip() {
        let g = Grid::new(3, 0.5, 6).unwrap();
        for f in 0..g.len() {
            let idx = g.index(f);
            assert_eq!(g.flat(&idx[..3]), f);
        }
        // last axis fastest
        assert_eq!(g.index(1), [0, 0, 1]);
        assert_eq!(g.point(0), [-0.5, -0.5, -0.5]);
    }

    #[test]
    fn lattice_indices() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        assert_eq!(g.signed_index(3), 3);
        assert_eq!(g.signed_index(4), -4);
        assert_eq!(g.unsigned_index(-4), Some(4));
        assert_eq!(g.unsigned_index(4), None);
        let f = g.flat(&[1, 7]);
        assert_eq!(g.mirror(f), g.flat(&[7, 1]));
    }
}
