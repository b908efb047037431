//! Side-effect modulation (SEM) waveforms.
//!
//! SEM is modelled as a zero-mean periodic intensity ripple added at the
//! receiver. Every waveform is a function of the phase
//! `phi(m) = 2 pi m l / n + theta0`, where `m` counts samples from the start
//! of the first OFDM symbol (prefix samples included) and `l` is the
//! frequency in units of the subcarrier spacing. Prototypes have unit
//! variance and are scaled by `sigma_s`:
//!
//! | waveform      | prototype                                          | fundamental              |
//! |---------------|----------------------------------------------------|--------------------------|
//! | `Sine`        | `sqrt(2) cos(phi)`                                 | `sqrt(2) cos(phi)`       |
//! | `Square`      | `sign(cos(phi))`                                   | `4/pi cos(phi)`          |
//! | `Sawtooth`    | `sqrt(3) (2 frac(phi / 2pi) - 1)`                  | `2 sqrt(3)/pi cos(phi + pi/2)` |
//! | `ClippedSine` | `(max(cos(phi), 0) - 1/pi) / sqrt(1/4 - 1/pi^2)`  | `1/2 / sqrt(1/4 - 1/pi^2) cos(phi)` |
//!
//! The clipped sine is a half-wave rectified cosine. The sawtooth rises
//! over each period, so its fundamental leads `cos(phi)` by a quarter cycle;
//! [`fundamental_of`] reports that shifted phase.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::ofdm::OfdmConfig;
#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Waveform {
    Sine,
    ClippedSine,
    Sawtooth,
    Square,
}

impl Waveform {
    pub const ALL: [Waveform; 4] = [
        Waveform::Sine,
        Waveform::ClippedSine,
        Waveform::Sawtooth,
        Waveform::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Waveform::Sine => "sine",
            Waveform::ClippedSine => "clipped_sine",
            Waveform::Sawtooth => "sawtooth",
            Waveform::Square => "square",
        }
    }

    /// Unit-variance, zero-mean prototype at phase `phi`.
    pub fn prototype(self, phi: f64) -> f64 {
        match self {
            Waveform::Sine => core::f64::consts::SQRT_2 * phi.cos(),
            Waveform::Square => {
                if phi.cos() >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Waveform::Sawtooth => {
                let u = phi / TAU;
                3f64.sqrt() * (2.0 * (u - u.floor()) - 1.0)
            }
            Waveform::ClippedSine => (phi.cos().max(0.0) - 1.0 / PI) / clipped_sine_sd(),
        }
    }

    /// Amplitude of the prototype's fundamental.
    pub fn fundamental_gain(self) -> f64 {
        match self {
            Waveform::Sine => core::f64::consts::SQRT_2,
            Waveform::Square => 4.0 / PI,
            Waveform::Sawtooth => 2.0 * 3f64.sqrt() / PI,
            Waveform::ClippedSine => 0.5 / clipped_sine_sd(),
        }
    }

    /// Phase of the fundamental relative to `cos(phi)`.
    pub fn fundamental_phase_offset(self) -> f64 {
        match self {
            Waveform::Sawtooth => FRAC_PI_2,
            _ => 0.0,
        }
    }
}

fn clipped_sine_sd() -> f64 {
    (0.25 - 1.0 / (PI * PI)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SemConfig {
    pub waveform: Waveform,
    /// Normalised frequency, cycles per `n` samples.
    pub l: f64,
    /// `E{s(m)^2}`.
    pub variance: f64,
    /// Phase at the first sample of the first symbol, radians.
    pub theta0: f64,
}

impl Default for SemConfig {
    fn default() -> Self {
        SemConfig {
            waveform: Waveform::Sine,
            l: 2.56,
            variance: 0.005,
            theta0: 0.0,
        }
    }
}

impl SemConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.l > 0.0 && self.l < n as f64 / 2.0) {
            return Err(Error::FrequencyOutOfRange(self.l));
        }
        if !(self.variance >= 0.0 && self.variance.is_finite()) {
            return Err(Error::InvalidConfig("SEM variance must be finite and >= 0"));
        }
        if !self.theta0.is_finite() {
            return Err(Error::InvalidConfig("theta0 must be finite"));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Sample `m` of the waveform.
    pub fn sample(&self, m: usize, n: usize) -> f64 {
        let phi = TAU * (m as f64) * self.l / n as f64 + self.theta0;
        self.sigma() * self.waveform.prototype(phi)
    }
}

/// `num_samples` samples of the SEM starting at sample 0.
pub fn generate(cfg: &SemConfig, num_samples: usize, n: usize) -> Result<Vec<f64>> {
    cfg.validate(n)?;
    if num_samples == 0 {
        return Err(Error::InvalidConfig("num_samples must be positive"));
    }
    Ok((0..num_samples).map(|m| cfg.sample(m, n)).collect())
}

/// SEM phase at the start of OFDM symbol `i` (1-based):
/// `theta0 + 2 pi l (1 + n_cp / n) (i - 1)` reduced to `[0, 2 pi)`.
pub fn phase_at_symbol(cfg: &SemConfig, i: usize, ofdm: &OfdmConfig) -> f64 {
    assert!(i >= 1, "symbols are numbered from 1");
    // Reduce the cycle count before scaling so long runs keep precision.
    let cycles = cfg.l * ofdm.symbol_len() as f64 / ofdm.n as f64 * (i - 1) as f64;
    wrap_phase(cfg.theta0 + TAU * (cycles - cycles.floor()))
}

pub(crate) fn wrap_phase(theta: f64) -> f64 {
    let t = theta - TAU * (theta / TAU).floor();
    if (0.0..TAU).contains(&t) { t } else { 0.0 }
}

/// Amplitude, phase and frequency of the fundamental Fourier component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemGroundTruth {
    pub a_fund: f64,
    pub theta0: f64,
    pub l: f64,
}

pub fn fundamental_of(cfg: &SemConfig) -> SemGroundTruth {
    SemGroundTruth {
        a_fund: cfg.waveform.fundamental_gain() * cfg.sigma(),
        theta0: wrap_phase(cfg.theta0 + cfg.waveform.fundamental_phase_offset()),
        l: cfg.l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cfg(waveform: Waveform, variance: f64) -> SemConfig {
        SemConfig {
            waveform,
            variance,
            ..SemConfig::default()
        }
    }

    #[test]
    fn sine_peak_amplitude() {
        let s = generate(&cfg(Waveform::Sine, 0.005), 25, 64).unwrap();
        let peak = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!((peak - 0.1).abs() < 1e-12);
    }

    #[test]
    fn square_levels() {
        let s = generate(&cfg(Waveform::Square, 0.01), 1000, 64).unwrap();
        assert!(s.iter().all(|&v| v == 0.1 || v == -0.1));
    }

    #[test]
    fn rejects_bad_frequency() {
        for l in [0.0, -1.0, 32.0, 40.0] {
            let c = SemConfig { l, ..SemConfig::default() };
            assert_eq!(generate(&c, 10, 64), Err(Error::FrequencyOutOfRange(l)));
        }
    }

    #[test]
    fn variance_over_long_run() {
        for w in Waveform::ALL {
            let s = generate(&cfg(w, 0.005), 1_000_000, 64).unwrap();
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / s.len() as f64;
            assert!((var / 0.005 - 1.0).abs() < 0.005, "{w:?}: {var}");
        }
    }

    #[test]
    fn zero_mean_at_incommensurate_frequency() {
        // At l = 2.56 the period is exactly 25 samples and the odd count
        // leaves a small DC term on the square and sawtooth waves.
        let l = 2.56 + 1e-3 * 2f64.sqrt();
        for w in Waveform::ALL {
            let c = SemConfig { l, ..cfg(w, 0.01) };
            let s = generate(&c, 1_000_000, 64).unwrap();
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            assert!(mean.abs() < 1e-3 * c.sigma(), "{w:?}: {mean}");
        }
    }

    #[test]
    fn phase_per_symbol() {
        let ofdm = OfdmConfig::aco(64, 16);
        let c = SemConfig::default();
        assert_eq!(phase_at_symbol(&SemConfig { theta0: 1.25, ..c.clone() }, 1, &ofdm), 1.25);
        assert!((phase_at_symbol(&c, 2, &ofdm) - 0.56 * TAU).abs() < 1e-12);
        assert!((phase_at_symbol(&c, 2, &ofdm) - 3.5186).abs() < 1e-4);
        let int = SemConfig { l: 3.0, theta0: 0.4, ..c };
        for i in 1..50 {
            assert!((phase_at_symbol(&int, i, &ofdm) - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_continuity_across_windows() {
        let ofdm = OfdmConfig::aco(64, 16).with_cp(16);
        let c = SemConfig { waveform: Waveform::Sawtooth, l: 2.37, variance: 0.02, theta0: 0.9 };
        let nt = ofdm.symbol_len();
        let long = generate(&c, 12 * nt, 64).unwrap();
        for big_l in [1, 5, 11] {
            let restart = SemConfig { theta0: phase_at_symbol(&c, big_l + 1, &ofdm), ..c.clone() };
            let short = generate(&restart, 1, 64).unwrap();
            assert!((long[big_l * nt] - short[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn fundamental_amplitudes() {
        assert!((fundamental_of(&cfg(Waveform::Sine, 0.5)).a_fund - 1.0).abs() < 1e-12);
        assert!((fundamental_of(&cfg(Waveform::Square, 1.0)).a_fund - 1.2732).abs() < 1e-4);
        assert!((fundamental_of(&cfg(Waveform::Sawtooth, 1.0)).a_fund - 1.1027).abs() < 1e-4);
    }

    /// Projects generated samples onto cos/sin at `l` and compares with the
    /// analytic fundamental. The frequency is kept off a rational grid so
    /// that no harmonic aliases onto the fundamental.
    #[test]
    fn fundamental_matches_projection() {
        let n = 64;
        let total = 1_000_000;
        for w in Waveform::ALL {
            for theta0 in [0.0, 1.1, 4.0] {
                let l = 2.56 + 1e-3 * 2f64.sqrt();
                let c = SemConfig { waveform: w, l, variance: 1.0, theta0 };
                let s = generate(&c, total, n).unwrap();
                let (mut a1, mut a2) = (0.0, 0.0);
                for (m, v) in s.iter().enumerate() {
                    let (sn, cs) = (TAU * m as f64 * c.l / n as f64).sin_cos();
                    a1 += v * cs;
                    a2 -= v * sn;
                }
                a1 *= 2.0 / total as f64;
                a2 *= 2.0 / total as f64;
                let amp = (a1 * a1 + a2 * a2).sqrt();
                let phase = wrap_phase(a2.atan2(a1));
                let truth = fundamental_of(&c);
                assert!((amp / truth.a_fund - 1.0).abs() < 0.005, "{w:?} amp {amp}");
                let dphi = (phase - truth.theta0 + PI).rem_euclid(TAU) - PI;
                assert!(dphi.abs() < 0.005, "{w:?} phase {phase} vs {}", truth.theta0);
            }
        }
    }

    #[test]
    fn wrap_range() {
        for t in [-7.0, -TAU, 0.0, 3.0, TAU, 100.0] {
            let w = wrap_phase(t);
            assert!((0.0..TAU).contains(&w));
        }
        assert_eq!(vec![wrap_phase(-1e-18)], vec![0.0]);
    }
}
