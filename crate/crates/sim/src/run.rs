//! Single-point Monte-Carlo runners.
//!
//! Every point is a sequence of independent windows. Window `j` draws all
//! its randomness (SEM phase, data, pilots, noise) from
//! [`window_rng`]`(point_seed, j)`, so a point's result depends only on the
//! spec and its seed, never on how windows are spread over threads.
//!
//! A window holds `L = window_symbols` data symbols. In pilot mode it is
//! preceded by `L` known pilot symbols; the SEM runs phase-continuously
//! over pilot and data, and only data bits are counted.

use std::f64::consts::{PI, TAU};

use rand::{Rng, RngExt};
use rayon::prelude::*;
use semofdm::channel::{noise_sigma, transmit_in_place};
use semofdm::mitigation::{
    MitigationConfig, Mode, SinusoidEstimate, blind_mitigate_with, pilot_mitigate, subtract_in_place,
};
use semofdm::ofdm::Modem;
use semofdm::sem::{SemConfig, SemGroundTruth, fundamental_of};
use semofdm::Error;

use crate::error::{Result, SimError};
use crate::seed::window_rng;
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BerPoint {
    pub errors: u64,
    pub bits: u64,
    /// Hit `max_bits` before collecting `min_errors` errors.
    pub truncated: bool,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 { 0.0 } else { self.errors as f64 / self.bits as f64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsePoint {
    pub rmse_amp: f64,
    /// Circular phase error, degrees.
    pub rmse_phase: f64,
    pub estimates: usize,
}

/// Estimation failures after which a receiver simply skips mitigation.
fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::DegenerateFrequency | Error::FrequencyAtEdge { .. } | Error::ResidualTooShort(_)
    )
}

struct Link {
    modem: Modem,
    sem: SemConfig,
    mit: MitigationConfig,
    sigma_w: f64,
    window: usize,
}

struct Received {
    bits: Vec<bool>,
    x: Vec<f64>,
    y: Vec<f64>,
    truth: SemGroundTruth,
}

impl Link {
    fn new(spec: &ExperimentSpec) -> Result<Self> {
        spec.ofdm.validate()?;
        spec.sem.validate(spec.ofdm.n)?;
        spec.mitigation.validate()?;
        let modem = Modem::new(spec.ofdm.clone())?;
        let sigma_w = noise_sigma(spec.eb_opt_n0_db, spec.ofdm.bits_per_sample(), 1.0)?;
        Ok(Link {
            modem,
            sem: spec.sem.clone(),
            mit: spec.mitigation.clone(),
            sigma_w,
            window: spec.mitigation.window_symbols,
        })
    }

    fn symbol_len(&self) -> usize {
        self.modem.config().symbol_len()
    }

    /// Draws a random SEM phase and `symbols` symbols of data, and passes
    /// them through the channel.
    fn transmit<R: Rng>(&self, symbols: usize, rng: &mut R) -> Result<Received> {
        let sem = SemConfig {
            theta0: rng.random_range(0.0..TAU),
            ..self.sem.clone()
        };
        let bits = random_bits(rng, symbols * self.modem.config().bits_per_symbol());
        let mut x = Vec::with_capacity(symbols * self.symbol_len());
        self.modem.modulate_bits(&bits, &mut x)?;
        let n = self.modem.config().n;
        let s: Vec<f64> = if sem.variance == 0.0 {
            vec![0.0; x.len()]
        } else {
            (0..x.len()).map(|m| sem.sample(m, n)).collect()
        };
        let mut y = x.clone();
        transmit_in_place(&mut y, &s, self.sigma_w, rng)?;
        Ok(Received {
            bits,
            x,
            y,
            truth: fundamental_of(&sem),
        })
    }

    fn ber_window<R: Rng>(&self, rng: &mut R) -> Result<(u64, u64)> {
        let n = self.modem.config().n;
        let pilot = self.mit.mode == Mode::Pilot;
        let total = if pilot { 2 * self.window } else { self.window };
        let rx = self.transmit(total, rng)?;
        let (data_bits, samples) = match self.mit.mode {
            Mode::None => (&rx.bits[..], rx.y),
            Mode::Blind => {
                let y = match blind_mitigate_with(&self.modem, &rx.y, &self.mit, self.sem.l) {
                    Ok(m) => m.samples,
                    Err(e) if recoverable(&e) => rx.y,
                    Err(e) => return Err(e.into()),
                };
                (&rx.bits[..], y)
            }
            Mode::Pilot => {
                let split = self.window * self.symbol_len();
                let (y_p, y_d) = rx.y.split_at(split);
                let mut y_d = y_d.to_vec();
                match pilot_mitigate(y_p, &rx.x[..split], self.modem.config(), &self.mit, self.sem.l) {
                    Ok(est) => subtract_in_place(&mut y_d, &est.advanced_by(split, n), n),
                    Err(e) if recoverable(&e) => {}
                    Err(e) => return Err(e.into()),
                }
                let k = self.window * self.modem.config().bits_per_symbol();
                (&rx.bits[k..], y_d)
            }
        };
        let (_, decided) = self.modem.detect(&samples)?;
        let errors = decided.iter().zip(data_bits).filter(|(a, b)| a != b).count();
        Ok((errors as u64, data_bits.len() as u64))
    }

    /// One estimate of the SEM fundamental and the value it should match.
    fn estimate_window<R: Rng>(&self, rng: &mut R) -> Result<(SinusoidEstimate, SemGroundTruth)> {
        let rx = self.transmit(self.window, rng)?;
        let est = match self.mit.mode {
            Mode::None => return Err(SimError::Spec("estimation needs mitigation mode blind or pilot".into())),
            Mode::Blind => blind_mitigate_with(&self.modem, &rx.y, &self.mit, self.sem.l)?
                .estimate
                .expect("blind mode always estimates"),
            Mode::Pilot => pilot_mitigate(&rx.y, &rx.x, self.modem.config(), &self.mit, self.sem.l)?,
        };
        Ok((est, rx.truth))
    }
}

fn random_bits<R: Rng>(rng: &mut R, count: usize) -> Vec<bool> {
    let mut bits = Vec::with_capacity(count);
    while bits.len() < count {
        let word: u64 = rng.random();
        let take = (count - bits.len()).min(64);
        bits.extend((0..take).map(|b| (word >> b) & 1 == 1));
    }
    bits
}

/// Signed phase difference wrapped to `(-pi, pi]`.
pub fn phase_error(estimate: f64, truth: f64) -> f64 {
    let d = (estimate - truth).rem_euclid(TAU);
    if d > PI { d - TAU } else { d }
}

/// Simulates windows in batches of `stopping.batch_windows` until the
/// stopping rule is met.
pub fn run_ber_point(spec: &ExperimentSpec, seed: u64) -> Result<BerPoint> {
    let link = Link::new(spec)?;
    let stop = spec.stopping;
    let batch = stop.batch_windows.max(1) as u64;
    let (mut errors, mut bits, mut next) = (0u64, 0u64, 0u64);
    loop {
        let counts: Vec<Result<(u64, u64)>> = (next..next + batch)
            .into_par_iter()
            .map(|w| link.ber_window(&mut window_rng(seed, w)))
            .collect();
        next += batch;
        for c in counts {
            let (e, b) = c?;
            errors += e;
            bits += b;
        }
        if bits >= stop.min_bits && errors >= stop.min_errors {
            return Ok(BerPoint {
                errors,
                bits,
                truncated: false,
            });
        }
        if bits >= stop.max_bits {
            return Ok(BerPoint {
                errors,
                bits,
                truncated: true,
            });
        }
    }
}

/// RMS amplitude and phase error over `stopping.estimates` independent
/// windows, each with a fresh uniformly random SEM phase.
pub fn run_rmse_point(spec: &ExperimentSpec, seed: u64) -> Result<RmsePoint> {
    let link = Link::new(spec)?;
    let count = spec.stopping.estimates;
    let errs: Vec<Result<(f64, f64)>> = (0..count as u64)
        .into_par_iter()
        .map(|j| {
            let (est, truth) = link.estimate_window(&mut window_rng(seed, j))?;
            Ok((est.a_hat - truth.a_fund, phase_error(est.theta_hat, truth.theta0)))
        })
        .collect();
    let (mut sa, mut sp) = (0.0, 0.0);
    for e in errs {
        let (da, dp) = e?;
        sa += da * da;
        sp += dp * dp;
    }
    Ok(RmsePoint {
        rmse_amp: (sa / count as f64).sqrt(),
        rmse_phase: (sp / count as f64).sqrt().to_degrees(),
        estimates: count,
    })
}
