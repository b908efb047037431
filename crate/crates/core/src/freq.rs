//! Frequency estimation by interpolation on Fourier coefficients.
//!
//! A coarse search picks the strongest DFT bin `k` of the residual. The
//! fractional offset `d` is then refined by evaluating the DTFT half a bin
//! either side of the current estimate,
//!
//! ```text
//! X(+-) = sum r(m) exp(-j 2 pi (k + d +- 1/2) m / N)
//! d    <- d + 1/2 Re{(X(+) + X(-)) / (X(+) - X(-))}
//! ```
//!
//! which converges to within the Cramer-Rao bound in two iterations.

use core::f64::consts::TAU;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use alloc::vec::Vec;

use crate::dft::{dft, power_spectrum};
use crate::mitigation::ResidualSignal;
use crate::{Error, Result};

/// Shortest residual the estimator accepts.
pub const MIN_LEN: usize = 64;

/// Estimated SEM frequency in cycles per `n` samples.
pub fn estimate_frequency(residual: &ResidualSignal, iterations: usize, n: usize) -> Result<f64> {
    let (bin, delta) = interpolate_peak(&residual.samples, iterations)?;
    Ok((bin as f64 + delta) * n as f64 / residual.samples.len() as f64)
}

/// Coarse peak bin (searched over `0..=len/2`) and refined fractional
/// offset, in bins of the full residual length.
///
/// The interpolation is exact for a complex exponential. On a real tone the
/// mirror image at the negative frequency adds a bias of order
/// `1 / (4 pi k)` bins, negligible for the window lengths used here.
pub fn interpolate_peak(r: &[f64], iterations: usize) -> Result<(usize, f64)> {
    let len = r.len();
    if len < MIN_LEN {
        return Err(Error::ResidualTooShort(len));
    }
    let bin = peak_bin(&power_spectrum(r));
    if bin == 0 || (len.is_multiple_of(2) && bin == len / 2) {
        return Err(Error::FrequencyAtEdge { bin });
    }
    let samples: Vec<Complex64> = r.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok((bin, refine(&samples, bin, iterations)))
}

/// Same as [`interpolate_peak`] for a complex signal, searching all bins.
pub fn interpolate_peak_complex(x: &[Complex64], iterations: usize) -> Result<(usize, f64)> {
    if x.len() < MIN_LEN {
        return Err(Error::ResidualTooShort(x.len()));
    }
    let power: Vec<f64> = dft(x).iter().map(|c| c.norm_sqr()).collect();
    let bin = peak_bin(&power);
    if bin == 0 {
        return Err(Error::FrequencyAtEdge { bin });
    }
    Ok((bin, refine(x, bin, iterations)))
}

fn peak_bin(power: &[f64]) -> usize {
    power
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &p)| if p > best.1 { (k, p) } else { best })
        .0
}

fn refine(x: &[Complex64], bin: usize, iterations: usize) -> f64 {
    let len = x.len() as f64;
    let mut delta = 0.0;
    for _ in 0..iterations {
        let plus = dtft(x, (bin as f64 + delta + 0.5) / len);
        let minus = dtft(x, (bin as f64 + delta - 0.5) / len);
        let step = 0.5 * ((plus + minus) / (plus - minus)).re;
        if step.is_finite() {
            delta += step;
        }
    }
    delta
}

/// `sum x(m) exp(-j 2 pi f m)` for `f` in cycles per sample.
fn dtft(x: &[Complex64], f: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, &v) in x.iter().enumerate() {
        // Reduce f m to a fraction of a cycle before the trig call.
        let cyc = f * m as f64;
        let (s, c) = (TAU * (cyc - cyc.floor())).sin_cos();
        acc += v * Complex64::new(c, -s);
    }
    acc
}
