//! Fourier transforms and spectral differential operators on the uniform
//! `M × M` grid of the unit torus.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Signed wavenumber of FFT index `idx`; the Nyquist index maps to `-M/2`.
#[inline]
pub fn wavenumber(idx: usize, m: usize) -> i64 {
    if idx < m / 2 {
        idx as i64
    } else {
        idx as i64 - m as i64
    }
}

#[derive(Clone)]
pub struct Spectral {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `4π²|k|²` per node, FFT ordering.
    symbol: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("m", &self.m).finish()
    }
}

impl Spectral {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut symbol = vec![0.0; m * m];
        for a in 0..m {
            let k1 = wavenumber(a, m) as f64;
            for b in 0..m {
                let k2 = wavenumber(b, m) as f64;
                symbol[a * m + b] = 4.0 * PI * PI * (k1 * k1 + k2 * k2);
            }
        }
        Self { m, forward, inverse, symbol }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `4π²|k|²` in FFT ordering.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn transform(&self, data: &mut [Complex<f64>], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        fft.process(data);
        transpose(data, m);
        fft.process(data);
        transpose(data, m);
    }

    /// Unnormalized forward transform `û_k = Σ_a u_a e^{−2πi k·a/M}`.
    pub fn forward(&self, u: &[f64]) -> Vec<Complex<f64>> {
        let mut data: Vec<Complex<f64>> = u.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Unnormalized inverse transform, real part.
    pub fn inverse_raw(&self, mut coeffs: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        self.transform(&mut coeffs, &self.inverse);
        coeffs
    }

    /// Inverse of [`Spectral::forward`], real part.
    pub fn inverse(&self, coeffs: Vec<Complex<f64>>) -> Vec<f64> {
        let scale = 1.0 / (self.m * self.m) as f64;
        self.inverse_raw(coeffs).into_iter().map(|c| c.re * scale).collect()
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let mut c = self.forward(u);
        for (v, s) in c.iter_mut().zip(&self.symbol) {
            *v *= -s;
        }
        self.inverse(c)
    }

    /// Mean-zero solution `v` of `Δv = f − ⟨f⟩`.
    pub fn inverse_laplacian(&self, f: &[f64]) -> Vec<f64> {
        let mut c = self.forward(f);
        c[0] = Complex::new(0.0, 0.0);
        for (v, s) in c.iter_mut().zip(&self.symbol).skip(1) {
            *v /= -s;
        }
        self.inverse(c)
    }

    /// `∫ ∇u · ∇v` by Parseval.
    pub fn gradient_inner(&self, u_hat: &[Complex<f64>], v_hat: &[Complex<f64>]) -> f64 {
        let m2 = (self.m * self.m) as f64;
        u_hat
            .iter()
            .zip(v_hat)
            .zip(&self.symbol)
            .map(|((a, b), s)| s * (a * b.conj()).re)
            .sum::<f64>()
            / (m2 * m2)
    }
}

fn transpose(data: &mut [Complex<f64>], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}
