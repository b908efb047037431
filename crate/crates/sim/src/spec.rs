//! Experiment description, loadable from TOML.
//!
//! ```toml
//! eb_opt_n0_db = 10.0
//! master_seed = 1
//!
//! [ofdm]
//! scheme = "dco"
//! bias_db = 7.0
//!
//! [sem]
//! waveform = "square"
//! variance = 0.01
//!
//! [mitigation]
//! mode = "blind"
//!
//! [sweep]
//! kind = "eb_n0"
//! values = [0.0, 4.0, 8.0, 12.0]
//! ```
//!
//! Every table and key is optional; missing ones take the defaults below.

use std::path::Path;

use semofdm::mitigation::{MitigationConfig, Mode};
use semofdm::ofdm::OfdmConfig;
use semofdm::sem::SemConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Independent variable of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `E_b(opt)/N_0` in dB.
    EbN0,
    /// SEM variance at fixed `eb_opt_n0_db`.
    SemVariance,
    /// SEM normalised frequency `l`.
    SemFrequency,
    /// Estimator RMSE against the window length `L`.
    RmseVsL,
}

impl SweepKind {
    pub fn axis_name(self) -> &'static str {
        match self {
            SweepKind::EbN0 => "eb_opt_n0_db",
            SweepKind::SemVariance => "sem_variance",
            SweepKind::SemFrequency => "sem_l",
            SweepKind::RmseVsL => "window_symbols",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::EbN0 => (0..=8).map(|i| 2.0 * i as f64).collect(),
            SweepKind::SemVariance => vec![0.0005, 0.001, 0.0015, 0.002, 0.003, 0.004, 0.005, 0.0075, 0.01],
            SweepKind::SemFrequency => (2..=60).map(|i| i as f64 / 10.0).collect(),
            SweepKind::RmseVsL => vec![100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0],
        }
    }

    pub fn is_ber(self) -> bool {
        self != SweepKind::RmseVsL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub kind: SweepKind,
    /// Axis values; empty means [`SweepKind::default_values`].
    pub values: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            kind: SweepKind::EbN0,
            values: Vec::new(),
        }
    }
}

impl Sweep {
    pub fn resolved_values(&self) -> Vec<f64> {
        if self.values.is_empty() {
            self.kind.default_values()
        } else {
            self.values.clone()
        }
    }
}

/// Monte-Carlo budget.
///
/// A BER point stops once it has both `min_bits` bits and `min_errors`
/// errors, or at `max_bits`; in the latter case a point short of
/// `min_errors` is flagged truncated. RMSE points use `estimates` windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stopping {
    pub min_bits: u64,
    pub min_errors: u64,
    pub max_bits: u64,
    pub estimates: usize,
    /// Windows simulated between stopping checks.
    pub batch_windows: usize,
}

impl Stopping {
    pub const DESK: Stopping = Stopping {
        min_bits: 1_000_000,
        min_errors: 100,
        max_bits: 20_000_000,
        estimates: 200,
        batch_windows: 16,
    };

    pub const FULL: Stopping = Stopping {
        min_bits: 10_000_000,
        min_errors: 200,
        max_bits: 1_000_000_000,
        estimates: 1000,
        batch_windows: 16,
    };

    /// Smoke-test budget; numbers are too noisy for anything but plumbing.
    pub const QUICK: Stopping = Stopping {
        min_bits: 10_000,
        min_errors: 50,
        max_bits: 100_000,
        estimates: 20,
        batch_windows: 4,
    };
}

impl Default for Stopping {
    fn default() -> Self {
        Stopping::DESK
    }
}

pub const RNG_CHACHA8: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Fixed `E_b(opt)/N_0` for sweeps over another axis.
    pub eb_opt_n0_db: f64,
    pub master_seed: u64,
    /// PRNG family; only `"chacha8"` is implemented.
    pub rng: String,
    pub ofdm: OfdmConfig,
    pub sem: SemConfig,
    pub mitigation: MitigationConfig,
    pub sweep: Sweep,
    pub stopping: Stopping,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            eb_opt_n0_db: 10.0,
            master_seed: 1,
            rng: RNG_CHACHA8.to_string(),
            ofdm: OfdmConfig::default(),
            sem: SemConfig::default(),
            mitigation: MitigationConfig::default(),
            sweep: Sweep::default(),
            stopping: Stopping::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|source| SimError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.mitigation.validate()?;
        if self.rng != RNG_CHACHA8 {
            return Err(SimError::Spec(format!("unsupported rng {:?} (expected \"chacha8\")", self.rng)));
        }
        let values = self.sweep.resolved_values();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Spec("axis values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::Spec("axis values must be strictly increasing".into()));
        }
        let s = &self.stopping;
        if s.batch_windows == 0 {
            return Err(SimError::Spec("stopping.batch_windows must be >= 1".into()));
        }
        match self.sweep.kind {
            SweepKind::RmseVsL => {
                if self.mitigation.mode == Mode::None {
                    return Err(SimError::Spec("RMSE sweeps need mitigation mode blind or pilot".into()));
                }
                if s.estimates == 0 {
                    return Err(SimError::Spec("stopping.estimates must be >= 1".into()));
                }
                if values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                    return Err(SimError::Spec("window lengths must be positive integers".into()));
                }
            }
            _ => {
                if s.min_bits < 10_000 {
                    return Err(SimError::Spec("stopping.min_bits must be >= 10000".into()));
                }
                if s.min_errors < 50 {
                    return Err(SimError::Spec("stopping.min_errors must be >= 50".into()));
                }
                if s.max_bits < s.min_bits {
                    return Err(SimError::Spec("stopping.max_bits must be >= min_bits".into()));
                }
            }
        }
        for &v in &values {
            self.at(v).check_point()?;
        }
        Ok(())
    }

    /// Copy of the spec with the sweep variable set to `value`.
    pub fn at(&self, value: f64) -> ExperimentSpec {
        let mut s = self.clone();
        match self.sweep.kind {
            SweepKind::EbN0 => s.eb_opt_n0_db = value,
            SweepKind::SemVariance => s.sem.variance = value,
            SweepKind::SemFrequency => s.sem.l = value,
            SweepKind::RmseVsL => s.mitigation.window_symbols = value as usize,
        }
        s
    }

    fn check_point(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.sem.validate(self.ofdm.n)?;
        self.mitigation.validate()?;
        if self.eb_opt_n0_db.is_nan() {
            return Err(SimError::Spec("eb_opt_n0_db is NaN".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use semofdm::ofdm::Scheme;
    use semofdm::sem::Waveform;

    #[test]
    fn partial_toml_fills_defaults() {
        let spec = ExperimentSpec::from_toml(
            "eb_opt_n0_db = 21.0\n[ofdm]\nscheme = \"dco\"\nbias_db = 7.0\n[sem]\nwaveform = \"square\"\n",
        )
        .unwrap();
        assert_eq!(spec.ofdm.scheme, Scheme::Dco);
        assert_eq!(spec.ofdm.n, 256);
        assert_eq!(spec.sem.waveform, Waveform::Square);
        assert_eq!(spec.sem.l, 2.56);
        assert_eq!(spec.stopping, Stopping::DESK);
        spec.validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let mut spec = ExperimentSpec {
            ofdm: OfdmConfig::dco(64, 16, 13.0),
            ..ExperimentSpec::default()
        };
        spec.mitigation.mode = Mode::Pilot;
        spec.sweep.values = vec![1.0, 2.5];
        let back = ExperimentSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_axes() {
        assert!(ExperimentSpec::from_toml("eb_no = 3").is_err());
        let mut spec = ExperimentSpec::default();
        spec.sweep.values = vec![1.0, 1.0];
        assert!(spec.validate().is_err());
        spec.sweep.values = vec![1.0, 2.0];
        spec.stopping.min_errors = 10;
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::default();
        spec.sweep.kind = SweepKind::RmseVsL;
        assert!(spec.validate().is_err());
        spec.mitigation.mode = Mode::Blind;
        spec.validate().unwrap();
        spec.sweep.kind = SweepKind::SemFrequency;
        spec.sweep.values = vec![1.0, 200.0];
        assert!(spec.validate().is_err());
    }
}
