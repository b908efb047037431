//! End-to-end link through the public API.

use std::f64::consts::TAU;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semofdm::channel::{noise_sigma, transmit};
use semofdm::mitigation::{MitigationConfig, Mode, blind_mitigate, pilot_mitigate};
use semofdm::ofdm::{Modem, OfdmConfig};
use semofdm::sem::{SemConfig, Waveform, fundamental_of, generate};

const SYMBOLS: usize = 400;

fn setup(cfg: &OfdmConfig, rng: &mut ChaCha8Rng) -> (Modem, Vec<bool>, Vec<f64>) {
    let modem = Modem::new(cfg.clone()).unwrap();
    let bits: Vec<bool> = (0..SYMBOLS * cfg.bits_per_symbol()).map(|_| rng.random()).collect();
    let mut x = Vec::new();
    modem.modulate_bits(&bits, &mut x).unwrap();
    (modem, bits, x)
}

fn errors(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[test]
fn blind_cancellation_reduces_aco_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = OfdmConfig::aco(64, 16);
    let (modem, bits, x) = setup(&cfg, &mut rng);
    let sem_cfg = SemConfig {
        waveform: Waveform::Sine,
        l: 2.56,
        variance: 0.01,
        theta0: 1.0,
    };
    let sem = generate(&sem_cfg, x.len(), cfg.n).unwrap();
    let sigma = noise_sigma(12.0, cfg.bits_per_sample(), 1.0).unwrap();
    let y = transmit(&x, &sem, sigma, &mut rng).unwrap();

    let before = errors(&modem.detect(&y).unwrap().1, &bits);
    let mit = MitigationConfig {
        mode: Mode::Blind,
        window_symbols: SYMBOLS,
        ..MitigationConfig::default()
    };
    let out = blind_mitigate(&y, &cfg, &mit, sem_cfg.l).unwrap();
    let after = errors(&modem.detect(&out.samples).unwrap().1, &bits);
    assert!(before > 0);
    assert!(after * 3 < before, "{before} -> {after}");
}

#[test]
fn noiseless_pilot_recovers_fundamental_on_dco() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = OfdmConfig::dco(64, 16, 7.0).with_cp(8);
    let (_, _, x) = setup(&cfg, &mut rng);
    for waveform in Waveform::ALL {
        let sem_cfg = SemConfig {
            waveform,
            l: 3.0,
            variance: 0.01,
            theta0: 0.4,
        };
        let sem = generate(&sem_cfg, x.len(), cfg.n).unwrap();
        let y = transmit(&x, &sem, 0.0, &mut rng).unwrap();
        let mit = MitigationConfig {
            mode: Mode::Pilot,
            window_symbols: SYMBOLS,
            ..MitigationConfig::default()
        };
        let est = pilot_mitigate(&y, &x, &cfg, &mit, sem_cfg.l).unwrap();
        let truth = fundamental_of(&sem_cfg);
        // With l = 3 and n = 64 harmonic 63 aliases onto the fundamental.
        // Sine and clipped sine have no odd harmonics above the first, so
        // their fit is exact; sawtooth and square pick up a few percent of alias leakage.
        let tol = match waveform {
            Waveform::Sine | Waveform::ClippedSine => 1e-9,
            _ => 0.06,
        };
        let dt = (est.theta_hat - truth.theta0).rem_euclid(TAU);
        assert!((est.a_hat / truth.a_fund - 1.0).abs() < tol, "{waveform:?}");
        assert!(dt.min(TAU - dt) < tol, "{waveform:?}");
    }
}
