//! Multi-dimensional FFTs over row-major complex buffers.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached forward/inverse plans for a fixed row-major shape.
pub struct NdFft {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self { shape: shape.to_vec(), forward, inverse }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform, Σ f_j e^{−2πi jk/n} along every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Inverse transform including the 1/len normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len(), "buffer does not match transform shape");
        let plans = if inverse { &self.inverse } else { &self.forward };
        let dims = self.shape.len();
        let mut scratch = Vec::new();
        for axis in 0..dims {
            let n = self.shape[axis];
            let inner: usize = self.shape[axis + 1..].iter().product();
            let outer: usize = self.shape[..axis].iter().product();
            let plan = &plans[axis];
            if inner == 1 {
                plan.process(data);
                continue;
            }
            scratch.resize(n * inner, Complex64::new(0.0, 0.0));
            for o in 0..outer {
                let block = &mut data[o * n * inner..(o + 1) * n * inner];
                // gather the strided lines into contiguous rows
                for k in 0..n {
                    for j in 0..inner {
                        scratch[j * n + k] = block[k * inner + j];
                    }
                }
                plan.process(&mut scratch);
                for k in 0..n {
                    for j in 0..inner {
                        block[k * inner + j] = scratch[j * n + k];
                    }
                }
            }
        }
    }
}
