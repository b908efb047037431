//! Discrete Fourier transforms.
//!
//! [`Fft`] is an in-place radix-2 transform for the power-of-two symbol
//! sizes used by the modem. [`dft`] handles any length through Bluestein's
//! chirp-z algorithm on top of it; the frequency estimator needs that because
//! estimation windows are `L * N_T` samples long.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use crate::{Error, Result};

/// Radix-2 decimation-in-time FFT plan.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    log2n: u32,
    /// `exp(-j 2 pi k / n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
}

impl Fft {
    /// Plans a transform of size `n`, which must be a power of two.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig("FFT size must be a power of two"));
        }
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Fft {
            n,
            log2n: n.trailing_zeros(),
            twiddles,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalised forward transform, `X(k) = sum x(n) exp(-j 2 pi n k / N)`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    /// Unnormalised inverse transform, `x(n) = sum X(k) exp(+j 2 pi n k / N)`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.n, "buffer does not match FFT size");
        if self.n <= 1 {
            return;
        }
        let shift = usize::BITS - self.log2n;
        for i in 0..self.n {
            let j = i.reverse_bits() >> shift;
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.n {
            let stride = self.n / (2 * half);
            for start in (0..self.n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Unnormalised forward DFT of arbitrary length.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    if n.is_power_of_two() {
        let mut out = x.to_vec();
        Fft::new(n).expect("power of two").forward(&mut out);
        return out;
    }

    // Bluestein: n k = (n^2 + k^2 - (k - n)^2) / 2.
    let m = (2 * n - 1).next_power_of_two();
    let fft = Fft::new(m).expect("power of two");
    let two_n = 2 * n as u128;
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            // k^2 mod 2n keeps the phase argument small for long inputs.
            let r = (k as u128 * k as u128 % two_n) as f64;
            Complex64::from_polar(1.0, -PI * r / n as f64)
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for (slot, (xi, ci)) in a.iter_mut().zip(x.iter().zip(&chirp)) {
        *slot = xi * ci;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    fft.forward(&mut a);
    fft.forward(&mut b);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= bi;
    }
    fft.inverse(&mut a);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| a[k] * chirp[k] * scale).collect()
}

/// Magnitude-squared spectrum of a real signal, bins `0..=len/2`.
pub fn power_spectrum(x: &[f64]) -> Vec<f64> {
    let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let spec = dft(&buf);
    spec[..x.len() / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}

#[inline]
pub(crate) fn unitary_scale(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}
