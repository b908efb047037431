//! Additive channel `y(m) = x(m) + s(m) + w(m)`.
//!
//! Noise is calibrated from the received optical energy per bit. With unit
//! sampling rate, mean received intensity `p_opt` and `R_b` bits per sample,
//! `E_b(opt) = p_opt^2 / R_b` and each sample carries white Gaussian noise of
//! variance `N_0 / 2`, giving
//!
//! ```text
//! sigma_w = p_opt / sqrt(2 R_b 10^(Eb/N0 / 10))
//! ```

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub eb_opt_n0_db: f64,
    /// Per-sample noise standard deviation.
    pub sigma_w: f64,
}

impl ChannelConfig {
    pub fn new(eb_opt_n0_db: f64, bits_per_sample: f64, p_opt: f64) -> Result<Self> {
        Ok(ChannelConfig {
            eb_opt_n0_db,
            sigma_w: noise_sigma(eb_opt_n0_db, bits_per_sample, p_opt)?,
        })
    }
}

pub fn noise_sigma(eb_opt_n0_db: f64, bits_per_sample: f64, p_opt: f64) -> Result<f64> {
    if bits_per_sample.is_nan() || bits_per_sample <= 0.0 {
        return Err(Error::NonPositiveRate);
    }
    if eb_opt_n0_db == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(p_opt / (2.0 * bits_per_sample * 10f64.powf(eb_opt_n0_db / 10.0)).sqrt())
}

/// Adds the SEM and independent Gaussian noise to the transmitted samples.
pub fn transmit<R: Rng + ?Sized>(x: &[f64], sem: &[f64], sigma_w: f64, rng: &mut R) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    transmit_in_place(&mut y, sem, sigma_w, rng)?;
    Ok(y)
}

pub fn transmit_in_place<R: Rng + ?Sized>(
    x: &mut [f64],
    sem: &[f64],
    sigma_w: f64,
    rng: &mut R,
) -> Result<()> {
    if x.len() != sem.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: sem.len(),
        });
    }
    if sigma_w == 0.0 {
        x.iter_mut().zip(sem).for_each(|(v, s)| *v += s);
        return Ok(());
    }
    for (v, s) in x.iter_mut().zip(sem) {
        let w: f64 = StandardNormal.sample(rng);
        *v += s + sigma_w * w;
    }
    Ok(())
}
