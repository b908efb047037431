//! Estimation and cancellation of the SEM fundamental.
//!
//! The receiver forms a residual `y - x_ref` that holds the SEM plus noise,
//! fits `A cos(2 pi m l / n + theta)` to it by linear least squares, and
//! subtracts the fitted tone from `y`. Two ways of getting `x_ref`:
//!
//! - blind: detect the data conventionally, then remodulate the decisions.
//!   Wrong decisions leave decision noise in the residual.
//! - pilot: `x_ref` is a known training block, so the residual is SEM plus
//!   Gaussian noise only.
//!
//! Sample index `m` runs across the whole estimation window, so the fitted
//! phase is continuous from symbol to symbol.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use crate::freq::estimate_frequency;
use crate::ofdm::{Modem, OfdmConfig};
use crate::sem::wrap_phase;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    None,
    Blind,
    Pilot,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MitigationConfig {
    pub mode: Mode,
    /// OFDM symbols per estimation window, `L`.
    pub window_symbols: usize,
    /// When false the SEM frequency is estimated from the residual.
    pub frequency_known: bool,
    /// Interpolation iterations of the frequency estimator.
    pub freq_iterations: usize,
}

impl Default for MitigationConfig {
    fn default() -> Self {
        MitigationConfig {
            mode: Mode::None,
            window_symbols: 1000,
            frequency_known: true,
            freq_iterations: 2,
        }
    }
}

impl MitigationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_symbols == 0 {
            return Err(Error::InvalidConfig("window_symbols must be >= 1"));
        }
        if self.freq_iterations == 0 {
            return Err(Error::InvalidConfig("freq_iterations must be >= 1"));
        }
        Ok(())
    }
}

/// Fitted fundamental `a_hat cos(2 pi m l_hat / n + theta_hat)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidEstimate {
    pub a_hat: f64,
    pub theta_hat: f64,
    pub l_hat: f64,
    /// `(a1, a2) = (A cos(theta), A sin(theta))`.
    pub coeffs: (f64, f64),
}

impl SinusoidEstimate {
    pub fn zero(l_hat: f64) -> Self {
        SinusoidEstimate {
            a_hat: 0.0,
            theta_hat: 0.0,
            l_hat,
            coeffs: (0.0, 0.0),
        }
    }

    pub fn from_coeffs(a1: f64, a2: f64, l_hat: f64) -> Self {
        let a_hat = (a1 * a1 + a2 * a2).sqrt();
        let theta_hat = if a_hat == 0.0 { 0.0 } else { wrap_phase(a2.atan2(a1)) };
        SinusoidEstimate {
            a_hat,
            theta_hat,
            l_hat,
            coeffs: (a1, a2),
        }
    }

    pub fn value_at(&self, m: usize, n: usize) -> f64 {
        self.a_hat * (TAU * m as f64 * self.l_hat / n as f64 + self.theta_hat).cos()
    }

    /// The same tone re-referenced to start `samples` later.
    pub fn advanced_by(&self, samples: usize, n: usize) -> Self {
        let cycles = self.l_hat * samples as f64 / n as f64;
        let theta = wrap_phase(self.theta_hat + TAU * (cycles - cycles.floor()));
        SinusoidEstimate::from_coeffs(self.a_hat * theta.cos(), self.a_hat * theta.sin(), self.l_hat)
    }
}

/// `y - x_hat`: SEM plus Gaussian noise minus decision noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSignal {
    pub samples: Vec<f64>,
}

/// Remodulates per-symbol decisions exactly as the transmitter would.
pub fn regenerate(decisions: &[Vec<Complex64>], cfg: &OfdmConfig) -> Result<Vec<f64>> {
    let modem = Modem::new(cfg.clone())?;
    let mut out = Vec::with_capacity(decisions.len() * cfg.symbol_len());
    for d in decisions {
        modem.modulate_into(&modem.build_frame(d)?, &mut out)?;
    }
    Ok(out)
}

pub fn residual(y: &[f64], x_hat: &[f64]) -> Result<ResidualSignal> {
    if y.len() != x_hat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: x_hat.len(),
        });
    }
    Ok(ResidualSignal {
        samples: y.iter().zip(x_hat).map(|(a, b)| a - b).collect(),
    })
}

/// Least-squares fit of a tone at frequency `l` to the residual.
///
/// With regressor rows `g(m) = [cos w m, -sin w m]`, `w = 2 pi l / n`, the
/// coefficients solve the 2x2 normal equations `(G'G) a = G' r`.
pub fn ls_fit(residual: &ResidualSignal, l: f64, n: usize) -> Result<SinusoidEstimate> {
    ls_fit_samples(&residual.samples, l, n)
}

pub fn ls_fit_samples(r: &[f64], l: f64, n: usize) -> Result<SinusoidEstimate> {
    let len = r.len();
    if len < 2 {
        return Err(Error::ResidualTooShort(len));
    }
    let w = TAU * l / n as f64;
    let (mut cc, mut ss, mut cs, mut cr, mut sr) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (m, &v) in r.iter().enumerate() {
        let (s, c) = (w * m as f64).sin_cos();
        cc += c * c;
        ss += s * s;
        cs += c * s;
        cr += c * v;
        sr += s * v;
    }
    // G'G = [[cc, -cs], [-cs, ss]], G'r = [cr, -sr].
    let det = cc * ss - cs * cs;
    if det.is_nan() || det.abs() < 1e-9 * (len as f64) * (len as f64) {
        return Err(Error::DegenerateFrequency);
    }
    let a1 = (ss * cr - cs * sr) / det;
    let a2 = (cs * cr - cc * sr) / det;
    Ok(SinusoidEstimate::from_coeffs(a1, a2, l))
}

/// `y(m) - A cos(2 pi m l / n + theta)` over the whole vector.
pub fn subtract_fundamental(y: &[f64], est: &SinusoidEstimate, n: usize) -> Vec<f64> {
    let mut out = y.to_vec();
    subtract_in_place(&mut out, est, n);
    out
}

pub fn subtract_in_place(y: &mut [f64], est: &SinusoidEstimate, n: usize) {
    if est.a_hat == 0.0 {
        return;
    }
    for (m, v) in y.iter_mut().enumerate() {
        *v -= est.value_at(m, n);
    }
}

/// Output of [`blind_mitigate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mitigated {
    pub samples: Vec<f64>,
    pub estimate: Option<SinusoidEstimate>,
}

/// Two-stage decision-directed cancellation over one window.
///
/// Stage one detects the data conventionally; stage two remodulates the
/// decisions, fits the fundamental to `y - x_hat` (at `nominal_l`, or at an
/// estimated frequency when `frequency_known` is off) and subtracts it. The
/// caller runs the final detection on the returned samples.
pub fn blind_mitigate(y: &[f64], ofdm: &OfdmConfig, mit: &MitigationConfig, nominal_l: f64) -> Result<Mitigated> {
    blind_mitigate_with(&Modem::new(ofdm.clone())?, y, mit, nominal_l)
}

pub fn blind_mitigate_with(modem: &Modem, y: &[f64], mit: &MitigationConfig, nominal_l: f64) -> Result<Mitigated> {
    mit.validate()?;
    if mit.mode == Mode::None {
        return Ok(Mitigated {
            samples: y.to_vec(),
            estimate: None,
        });
    }
    let (decisions, _) = modem.detect(y)?;
    let mut x_hat = Vec::with_capacity(y.len());
    modem.modulate_symbols(&decisions, &mut x_hat)?;
    let res = residual(y, &x_hat)?;
    let est = fit(&res, modem.config().n, mit, nominal_l)?;
    Ok(Mitigated {
        samples: subtract_fundamental(y, &est, modem.config().n),
        estimate: Some(est),
    })
}

/// Estimates the fundamental from a received pilot block and its known
/// transmitted waveform. Apply it to data that follows the pilot with
/// [`SinusoidEstimate::advanced_by`].
pub fn pilot_mitigate(
    y_p: &[f64],
    x_p: &[f64],
    ofdm: &OfdmConfig,
    mit: &MitigationConfig,
    nominal_l: f64,
) -> Result<SinusoidEstimate> {
    mit.validate()?;
    let nt = ofdm.symbol_len();
    if !y_p.len().is_multiple_of(nt) {
        return Err(Error::LengthNotMultiple {
            len: y_p.len(),
            symbol_len: nt,
        });
    }
    let res = residual(y_p, x_p)?;
    fit(&res, ofdm.n, mit, nominal_l)
}

fn fit(res: &ResidualSignal, n: usize, mit: &MitigationConfig, nominal_l: f64) -> Result<SinusoidEstimate> {
    let l = if mit.frequency_known {
        nominal_l
    } else {
        estimate_frequency(res, mit.freq_iterations, n)?
    };
    ls_fit(res, l, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::Scheme;
    use crate::sem::{SemConfig, Waveform, fundamental_of, generate};
    use alloc::vec;
    use core::f64::consts::PI;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn tone(len: usize, a: f64, l: f64, theta: f64, n: usize) -> Vec<f64> {
        (0..len).map(|m| a * (TAU * m as f64 * l / n as f64 + theta).cos()).collect()
    }

    fn sse(r: &[f64], a: f64, theta: f64, l: f64, n: usize) -> f64 {
        r.iter()
            .enumerate()
            .map(|(m, v)| (v - a * (TAU * m as f64 * l / n as f64 + theta).cos()).powi(2))
            .sum()
    }

    /// Independent oracle: 2-D grid over (A, theta) on the SSE, then
    /// successive zooms down to well below 1e-6 resolution.
    fn grid_search(r: &[f64], l: f64, n: usize, a_max: f64) -> (f64, f64) {
        let (mut a_lo, mut a_hi) = (0.0, a_max);
        let (mut t_lo, mut t_hi) = (0.0, TAU);
        let mut best = (0.0, 0.0);
        for round in 0..14 {
            let steps = if round == 0 { 160 } else { 24 };
            let mut best_e = f64::INFINITY;
            for i in 0..=steps {
                let a = a_lo + (a_hi - a_lo) * i as f64 / steps as f64;
                for j in 0..=steps {
                    let t = t_lo + (t_hi - t_lo) * j as f64 / steps as f64;
                    let e = sse(r, a, t, l, n);
                    if e < best_e {
                        best_e = e;
                        best = (a, t);
                    }
                }
            }
            let da = (a_hi - a_lo) / steps as f64 * 2.0;
            let dt = (t_hi - t_lo) / steps as f64 * 2.0;
            a_lo = (best.0 - da).max(0.0);
            a_hi = best.0 + da;
            t_lo = best.1 - dt;
            t_hi = best.1 + dt;
        }
        (best.0, wrap_phase(best.1))
    }

    fn phase_diff(a: f64, b: f64) -> f64 {
        (a - b + PI).rem_euclid(TAU) - PI
    }

    #[test]
    fn noiseless_tone_is_exact() {
        let r = ResidualSignal { samples: tone(640, 1.0, 2.56, 0.0, 64) };
        let est = ls_fit(&r, 2.56, 64).unwrap();
        assert!((est.a_hat - 1.0).abs() < 1e-9);
        assert!(phase_diff(est.theta_hat, 0.0).abs() < 1e-9);
        for theta in [0.3, 2.0, 3.5, 5.9] {
            let r = ResidualSignal { samples: tone(6400, 0.37, 3.71, theta, 64) };
            let est = ls_fit(&r, 3.71, 64).unwrap();
            assert!((est.a_hat - 0.37).abs() < 1e-9);
            assert!(phase_diff(est.theta_hat, theta).abs() < 1e-9);
            let (a1, a2) = est.coeffs;
            assert!(((a1 * a1 + a2 * a2).sqrt() - est.a_hat).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_residual() {
        let est = ls_fit(&ResidualSignal { samples: vec![0.0; 256] }, 2.56, 64).unwrap();
        assert_eq!(est.a_hat, 0.0);
        assert_eq!(est.theta_hat, 0.0);
    }

    #[test]
    fn degenerate_frequencies() {
        let r = ResidualSignal { samples: vec![1.0; 256] };
        assert_eq!(ls_fit(&r, 0.0, 64), Err(Error::DegenerateFrequency));
        assert_eq!(ls_fit(&r, 32.0, 64), Err(Error::DegenerateFrequency));
        assert_eq!(ls_fit(&ResidualSignal { samples: vec![1.0] }, 2.0, 64), Err(Error::ResidualTooShort(1)));
    }

    #[test]
    fn matches_grid_oracle_on_large_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, 0.2236).unwrap();
        let mut r = tone(64_000, 0.1, 2.56, 1.0, 64);
        r.iter_mut().for_each(|v| *v += noise.sample(&mut rng));
        let est = ls_fit_samples(&r, 2.56, 64).unwrap();
        let (a, t) = grid_search(&r, 2.56, 64, 0.3);
        assert!((est.a_hat - a).abs() < 1e-6, "{} vs {a}", est.a_hat);
        assert!(phase_diff(est.theta_hat, t).abs() < 1e-6 / est.a_hat.max(1e-3) * 10.0);
        assert!(sse(&r, est.a_hat, est.theta_hat, 2.56, 64) <= sse(&r, a, t, 2.56, 64) + 1e-9);
    }

    #[test]
    fn matches_grid_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let len = rng.random_range(64..400);
            let l = rng.random_range(0.3..20.0);
            let a = rng.random_range(0.2..2.0);
            let theta = rng.random_range(0.0..TAU);
            let noise = Normal::new(0.0, rng.random_range(0.01..0.3)).unwrap();
            let mut r = tone(len, a, l, theta, 64);
            r.iter_mut().for_each(|v| *v += noise.sample(&mut rng));
            let est = ls_fit_samples(&r, l, 64).unwrap();
            let (ga, gt) = grid_search(&r, l, 64, 4.0);
            assert!((est.a_hat - ga).abs() < 1e-6, "A {} vs {ga}", est.a_hat);
            assert!(phase_diff(est.theta_hat, gt).abs() * ga < 1e-6);
        }
    }

    #[test]
    fn advancing_keeps_the_tone() {
        let est = SinusoidEstimate::from_coeffs(0.3, -0.4, 2.56);
        let later = est.advanced_by(640, 64);
        for m in 0..100 {
            assert!((later.value_at(m, 64) - est.value_at(m + 640, 64)).abs() < 1e-12);
        }
    }

    #[test]
    fn regeneration_locality() {
        let cfg = OfdmConfig::aco(64, 16);
        let modem = Modem::new(cfg.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bits: Vec<bool> = (0..3 * cfg.bits_per_symbol()).map(|_| rng.random()).collect();
        let syms = modem.qam().map(&bits).unwrap();
        let mut decisions: Vec<Vec<Complex64>> = syms.chunks(16).map(|c| c.to_vec()).collect();
        let mut x = Vec::new();
        modem.modulate_bits(&bits, &mut x).unwrap();
        assert_eq!(regenerate(&decisions, &cfg).unwrap(), x);

        decisions[1][3] = -decisions[1][3];
        let x2 = regenerate(&decisions, &cfg).unwrap();
        assert_eq!(x[..64], x2[..64]);
        assert_eq!(x[128..], x2[128..]);
        assert_ne!(x[64..128], x2[64..128]);

        let zeros = vec![vec![Complex64::new(0.0, 0.0); 16]; 2];
        assert!(regenerate(&zeros, &cfg).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn residual_contract() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(residual(&y, &y).unwrap().samples, [0.0; 3]);
        assert!(residual(&y, &y[..2]).is_err());
    }

    #[test]
    fn subtraction_identities() {
        let y: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(subtract_fundamental(&y, &SinusoidEstimate::zero(2.56), 64), y);
        let s = tone(100, 0.2, 2.56, 0.7, 64);
        let sum: Vec<f64> = y.iter().zip(&s).map(|(a, b)| a + b).collect();
        let est = SinusoidEstimate::from_coeffs(0.2 * 0.7f64.cos(), 0.2 * 0.7f64.sin(), 2.56);
        let back = subtract_fundamental(&sum, &est, 64);
        for (a, b) in back.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn noiseless_window(cfg: &OfdmConfig, sem: &SemConfig, symbols: usize, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<bool>) {
        let modem = Modem::new(cfg.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..symbols * cfg.bits_per_symbol()).map(|_| rng.random()).collect();
        let mut x = Vec::new();
        modem.modulate_bits(&bits, &mut x).unwrap();
        let s = generate(sem, x.len(), cfg.n).unwrap();
        let y = x.iter().zip(&s).map(|(a, b)| a + b).collect();
        (x, y, bits)
    }

    #[test]
    fn blind_cancels_small_sine_exactly() {
        // Small enough that first-stage decisions are all correct.
        let sem = SemConfig { waveform: Waveform::Sine, l: 2.56, variance: 1e-4, theta0: 0.8 };
        for cfg in [OfdmConfig::aco(64, 16), OfdmConfig::dco(64, 16, 13.0).with_cp(8)] {
            let (x, y, bits) = noiseless_window(&cfg, &sem, 50, 5);
            let mit = MitigationConfig { mode: Mode::Blind, window_symbols: 50, ..Default::default() };
            let out = blind_mitigate(&y, &cfg, &mit, sem.l).unwrap();
            let est = out.estimate.unwrap();
            let truth = fundamental_of(&sem);
            assert!((est.a_hat - truth.a_fund).abs() < 1e-9, "{:?}", cfg.scheme);
            assert!(phase_diff(est.theta_hat, truth.theta0).abs() < 1e-9);
            let leftover = ls_fit_samples(
                &out.samples.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>(),
                sem.l,
                cfg.n,
            )
            .unwrap();
            assert!(leftover.a_hat < 1e-9);
            let (_, detected) = Modem::new(cfg).unwrap().detect(&out.samples).unwrap();
            assert_eq!(detected, bits);
        }
    }

    #[test]
    fn blind_without_sem_is_identity() {
        let cfg = OfdmConfig::aco(64, 16);
        let sem = SemConfig { variance: 0.0, ..SemConfig::default() };
        let (_, y, _) = noiseless_window(&cfg, &sem, 20, 6);
        let mit = MitigationConfig { mode: Mode::Blind, ..Default::default() };
        let out = blind_mitigate(&y, &cfg, &mit, 2.56).unwrap();
        assert!(out.estimate.unwrap().a_hat < 1e-12);
        for (a, b) in out.samples.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
        let off = MitigationConfig { mode: Mode::None, ..Default::default() };
        assert_eq!(blind_mitigate(&y, &cfg, &off, 2.56).unwrap().samples, y);
    }

    #[test]
    fn pilot_noiseless_recovery_any_amplitude() {
        let cfg = OfdmConfig::aco(64, 16);
        for variance in [0.01, 0.5, 1.125] {
            let sem = SemConfig { waveform: Waveform::Sine, l: 2.56, variance, theta0: 2.2 };
            let (x, y, _) = noiseless_window(&cfg, &sem, 20, 7);
            let mit = MitigationConfig { mode: Mode::Pilot, ..Default::default() };
            let est = pilot_mitigate(&y, &x, &cfg, &mit, sem.l).unwrap();
            let truth = fundamental_of(&sem);
            assert!((est.a_hat - truth.a_fund).abs() < 1e-9);
            assert!(phase_diff(est.theta_hat, truth.theta0).abs() < 1e-9);
        }
    }

    #[test]
    fn pilot_estimate_reduces_sem_by_20_db() {
        let cfg = OfdmConfig::aco(64, 16);
        let sem = SemConfig { waveform: Waveform::Sine, l: 2.56, variance: 0.01, theta0: 1.3 };
        let sigma = crate::channel::noise_sigma(10.0, cfg.bits_per_sample(), 1.0).unwrap();
        let (x, clean, _) = noiseless_window(&cfg, &sem, 200, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = crate::channel::transmit(&clean, &vec![0.0; clean.len()], sigma, &mut rng).unwrap();
        let mit = MitigationConfig { mode: Mode::Pilot, ..Default::default() };
        let est = pilot_mitigate(&y, &x, &cfg, &mit, sem.l).unwrap();
        let s = generate(&sem, x.len(), cfg.n).unwrap();
        let before = ls_fit_samples(&s, sem.l, cfg.n).unwrap().a_hat;
        let left: Vec<f64> = subtract_fundamental(&y, &est, cfg.n).iter().zip(&y).zip(&s)
            .map(|((yt, yv), sv)| sv - (yv - yt))
            .collect();
        let after = ls_fit_samples(&left, sem.l, cfg.n).unwrap().a_hat;
        assert!(20.0 * (before / after).log10() >= 20.0, "{before} -> {after}");
    }

    #[test]
    fn unknown_frequency_pilot() {
        let cfg = OfdmConfig::aco(64, 16);
        let sem = SemConfig { waveform: Waveform::Sine, l: 2.5631, variance: 0.01, theta0: 0.4 };
        let (x, y, _) = noiseless_window(&cfg, &sem, 100, 10);
        let mit = MitigationConfig { mode: Mode::Pilot, frequency_known: false, ..Default::default() };
        let est = pilot_mitigate(&y, &x, &cfg, &mit, 99.0).unwrap();
        assert!((est.l_hat - sem.l).abs() < 1e-4);
        assert!((est.a_hat - fundamental_of(&sem).a_fund).abs() < 1e-3);
        assert_eq!(cfg.scheme, Scheme::Aco);
    }

    #[test]
    fn config_validation() {
        let bad = MitigationConfig { window_symbols: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = MitigationConfig { freq_iterations: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
