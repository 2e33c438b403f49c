//! FFT plumbing shared by the periodogram, the Fejér sums and the
//! product-integration convolution.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Evaluates trigonometric sums `Σ_k a_k e^{i k λ_j}` exactly at every
/// point `λ_j = 2πj/L` of a grid with `L + 1` points.
///
/// `e^{ikλ_j}` is `L`-periodic in `k`, so coefficients are folded modulo
/// `L` before a length-`L` transform; no interpolation between Fourier
/// frequencies is involved.
pub(crate) struct GridDft {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl GridDft {
    pub fn new(num_points: usize) -> Self {
        let len = num_points - 1;
        let fft = FftPlanner::new().plan_fft_inverse(len);
        Self { len, fft }
    }

    /// `coeffs[k]` multiplies `e^{i (k + offset) λ}`.
    pub fn sums(&self, coeffs: &[f64], offset: usize) -> Vec<Complex<f64>> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (k, &a) in coeffs.iter().enumerate() {
            buf[(k + offset) % self.len].re += a;
        }
        self.fft.process(&mut buf);
        buf
    }

    pub fn len(&self) -> usize {
        self.len
    }
}

/// Linear convolution `out_i = Σ_{j ≤ i} kernel_{i−j} x_j` for `i < n`,
/// with the kernel transform cached.
pub(crate) struct Convolver {
    n: usize,
    size: usize,
    kernel_hat: Vec<Complex<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    direct_kernel: Option<Vec<f64>>,
}

const DIRECT_LIMIT: usize = 64;

impl Convolver {
    pub fn new(kernel: &[f64]) -> Self {
        let n = kernel.len();
        if n <= DIRECT_LIMIT {
            let mut planner = FftPlanner::new();
            return Self {
                n,
                size: 0,
                kernel_hat: Vec::new(),
                fwd: planner.plan_fft_forward(1),
                inv: planner.plan_fft_inverse(1),
                direct_kernel: Some(kernel.to_vec()),
            };
        }
        let size = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut kernel_hat = vec![Complex::new(0.0, 0.0); size];
        for (dst, &k) in kernel_hat.iter_mut().zip(kernel) {
            dst.re = k;
        }
        fwd.process(&mut kernel_hat);
        Self {
            n,
            size,
            kernel_hat,
            fwd,
            inv,
            direct_kernel: None,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        if let Some(kernel) = &self.direct_kernel {
            return (0..self.n)
                .map(|i| (0..=i).map(|j| kernel[i - j] * x[j]).sum())
                .collect();
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.size];
        for (dst, &v) in buf.iter_mut().zip(x) {
            dst.re = v;
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf[..self.n].iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_sums_match_direct_evaluation() {
        let coeffs = [0.3, -1.2, 2.0, 0.7, 0.1, -0.4, 1.5];
        for &num_points in &[4usize, 5, 9, 13] {
            let dft = GridDft::new(num_points);
            let out = dft.sums(&coeffs, 1);
            let l = dft.len();
            for (j, sum) in out.iter().enumerate().take(l) {
                let lam = std::f64::consts::TAU * j as f64 / l as f64;
                let (mut re, mut im) = (0.0, 0.0);
                for (k, &a) in coeffs.iter().enumerate() {
                    let ang = (k + 1) as f64 * lam;
                    re += a * ang.cos();
                    im += a * ang.sin();
                }
                assert_relative_eq!(sum.re, re, epsilon = 1e-12);
                assert_relative_eq!(sum.im, im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fft_convolution_matches_direct() {
        let n = 200;
        let kernel: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let x: Vec<f64> = (0..n).map(|j| (j as f64 * 0.37).sin()).collect();
        let fast = Convolver::new(&kernel).apply(&x);
        for i in 0..n {
            let direct: f64 = (0..=i).map(|j| kernel[i - j] * x[j]).sum();
            assert_relative_eq!(fast[i], direct, epsilon = 1e-12);
        }
    }
}
