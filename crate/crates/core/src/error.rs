use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the signal-processing routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An [`OfdmConfig`](crate::ofdm::OfdmConfig) or other configuration
    /// violates one of its invariants.
    InvalidConfig(&'static str),
    /// QAM order outside {4, 16, 64}.
    UnsupportedOrder(usize),
    /// Bit vector length is not a multiple of the bits per symbol.
    BitLength { len: usize, bits_per_symbol: usize },
    /// Wrong number of data symbols for one OFDM frame.
    SymbolCount { expected: usize, got: usize },
    /// An ACO-OFDM frame carries energy on an even subcarrier.
    NonzeroEvenBins,
    /// DCO-OFDM requested without a bias level.
    MissingBias,
    /// Received vector is not a whole number of OFDM symbols.
    LengthNotMultiple { len: usize, symbol_len: usize },
    /// Two vectors that must be aligned sample-for-sample are not.
    LengthMismatch { left: usize, right: usize },
    /// SEM normalised frequency outside `(0, n/2)`.
    FrequencyOutOfRange(f64),
    /// The least-squares normal matrix is singular at this frequency.
    DegenerateFrequency,
    /// The coarse spectral peak sits at DC or Nyquist.
    FrequencyAtEdge { bin: usize },
    /// Too few samples to run the estimator.
    ResidualTooShort(usize),
    /// Bit rate must be strictly positive.
    NonPositiveRate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::UnsupportedOrder(m) => write!(f, "unsupported QAM order {m} (expected 4, 16 or 64)"),
            Error::BitLength { len, bits_per_symbol } => {
                write!(f, "{len} bits is not a multiple of {bits_per_symbol} bits per symbol")
            }
            Error::SymbolCount { expected, got } => {
                write!(f, "frame needs {expected} data symbols, got {got}")
            }
            Error::NonzeroEvenBins => f.write_str("ACO-OFDM frame has energy on even subcarriers"),
            Error::MissingBias => f.write_str("DCO-OFDM needs a bias level"),
            Error::LengthNotMultiple { len, symbol_len } => {
                write!(f, "{len} samples is not a multiple of the symbol length {symbol_len}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right} samples")
            }
            Error::FrequencyOutOfRange(l) => write!(f, "normalised frequency {l} outside (0, n/2)"),
            Error::DegenerateFrequency => {
                f.write_str("least-squares system is singular at this frequency")
            }
            Error::FrequencyAtEdge { bin } => write!(f, "spectral peak at edge bin {bin}"),
            Error::ResidualTooShort(len) => write!(f, "residual of {len} samples is too short"),
            Error::NonPositiveRate => f.write_str("bits per sample must be positive"),
        }
    }
}

impl core::error::Error for Error {}
