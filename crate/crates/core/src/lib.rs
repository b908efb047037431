//! Optical OFDM over an intensity channel with side-effect modulation.
//!
//! This crate holds the signal-processing side of the simulator and is
//! `no_std` (it needs `alloc`):
//!
//! - [`qam`]: square Gray-mapped QAM with unit average energy.
//! - [`ofdm`]: ACO-OFDM and DCO-OFDM framing, modulation and detection.
//! - [`sem`]: periodic side-effect modulation (SEM) waveforms and the
//!   ground-truth parameters of their fundamental.
//! - [`channel`]: `y = x + s + w` with calibrated AWGN.
//! - [`mitigation`]: blind (decision-directed) and pilot-assisted
//!   least-squares estimation and cancellation of the SEM fundamental.
//! - [`freq`]: interpolated-DFT estimation of an unknown SEM frequency.
//!
//! Everything is a pure function of its inputs. Randomness only enters
//! through an explicit [`rand::Rng`] handed to [`channel::transmit`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod dft;
mod error;
pub mod freq;
pub mod mitigation;
pub mod ofdm;
pub mod qam;
pub mod sem;

pub use error::{Error, Result};
pub use num_complex::Complex64;
