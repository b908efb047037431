//! Square Gray-mapped QAM.
//!
//! Each symbol carries `log2(M)` bits. The first half selects the in-phase
//! level and the second half the quadrature level, both through a reflected
//! Gray code. Gray code `0` sits on the most positive level, so for 4-QAM
//! the bits `00` map to `(1 + j) / sqrt(2)`. Constellations are scaled to
//! unit average energy.
//!
//! The constellation index of a point is its bit pattern read MSB first.
//! When two points are equally close to a received value the one with the
//! smaller index wins.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent in core on newer toolchains
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Qam {
    order: usize,
    bits_per_axis: usize,
    /// Axis amplitude for each Gray code, already energy-normalised.
    levels: Vec<f64>,
}

impl Qam {
    pub fn new(order: usize) -> Result<Self> {
        let bits_per_axis = match order {
            4 => 1,
            16 => 2,
            64 => 3,
            m => return Err(Error::UnsupportedOrder(m)),
        };
        let side = 1usize << bits_per_axis;
        // Mean energy of the unscaled square grid is 2 (M - 1) / 3.
        let scale = 1.0 / (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        let levels = (0..side)
            .map(|gray| {
                let pos = gray_decode(gray);
                ((side - 1) as f64 - 2.0 * pos as f64) * scale
            })
            .collect();
        Ok(Qam {
            order,
            bits_per_axis,
            levels,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    /// Constellation point for index `idx`.
    pub fn point(&self, idx: usize) -> Complex64 {
        let q = idx & ((1 << self.bits_per_axis) - 1);
        let i = idx >> self.bits_per_axis;
        Complex64::new(self.levels[i], self.levels[q])
    }

    pub fn map(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::BitLength {
                len: bits.len(),
                bits_per_symbol: k,
            });
        }
        Ok(bits
            .chunks_exact(k)
            .map(|chunk| {
                let idx = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                self.point(idx)
            })
            .collect())
    }

    /// Nearest constellation index to `y`.
    pub fn slice(&self, y: Complex64) -> usize {
        let i = self.slice_axis(y.re);
        let q = self.slice_axis(y.im);
        (i << self.bits_per_axis) | q
    }

    /// Square QAM decisions separate per axis; scanning Gray codes in
    /// increasing order keeps the first (smallest) code on ties.
    fn slice_axis(&self, v: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (code, &level) in self.levels.iter().enumerate() {
            let d = (v - level).abs();
            if d < best_d {
                best_d = d;
                best = code;
            }
        }
        best
    }

    /// Hard decision: returns the decided point and appends its bits.
    pub fn decide_into(&self, y: Complex64, bits: &mut Vec<bool>) -> Complex64 {
        let idx = self.slice(y);
        let k = self.bits_per_symbol();
        bits.extend((0..k).rev().map(|s| (idx >> s) & 1 == 1));
        self.point(idx)
    }

    pub fn demap(&self, symbols: &[Complex64]) -> Vec<bool> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for &s in symbols {
            self.decide_into(s, &mut bits);
        }
        bits
    }
}

/// Maps bits onto unit-energy `m`-QAM symbols.
pub fn qam_map(bits: &[bool], m: usize) -> Result<Vec<Complex64>> {
    Qam::new(m)?.map(bits)
}

/// Minimum-distance demapping back to bits.
pub fn qam_demap(symbols: &[Complex64], m: usize) -> Result<Vec<bool>> {
    Ok(Qam::new(m)?.demap(symbols))
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}
