use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default segment length of the averaged cyclic periodogram.
pub const DEFAULT_SEGMENT_LENGTH: usize = 4096;

/// Fewest segments an estimate may rest on.
pub const MIN_SEGMENTS: usize = 8;

/// Running sums of windowed segment cross-spectra `X(f) conj(X(f - o/L))`
/// at a set of bin offsets `o`.
///
/// Segments are Hann-windowed with 50% overlap and normalised by the window
/// energy. Several sample paths may be fed in turn; each contributes its own
/// segments.
pub struct CyclicPeriodogram {
    period: usize,
    segment_len: usize,
    offsets: Vec<usize>,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    sum: Vec<Vec<Complex64>>,
    sum_sq: Vec<Vec<f64>>,
    segments: usize,
}

impl CyclicPeriodogram {
    pub fn new(period: usize, segment_len: usize, offsets: Vec<usize>) -> Result<Self> {
        if period == 0 || segment_len < 2 || segment_len % period != 0 {
            return Err(Error::InvalidParameter(format!(
                "segment length must be a multiple of P = {period}, got {segment_len}"
            )));
        }
        if offsets.iter().any(|&o| o >= segment_len) {
            return Err(Error::InvalidParameter("bin offset exceeds segment length".into()));
        }
        let window: Vec<f64> = (0..segment_len)
            .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / segment_len as f64).cos()))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(segment_len);
        let width = offsets.len();
        Ok(Self {
            period,
            segment_len,
            offsets,
            window,
            fft,
            sum: vec![vec![Complex64::new(0.0, 0.0); segment_len]; width],
            sum_sq: vec![vec![0.0; segment_len]; width],
            segments: 0,
        })
    }

    /// Offsets `k L / P` for `k = 0..P`.
    pub fn cycle_offsets(period: usize, segment_len: usize) -> Vec<usize> {
        (0..period).map(|k| k * segment_len / period).collect()
    }

    pub fn accumulate(&mut self, x: &[Complex64]) {
        let l = self.segment_len;
        let hop = l / 2;
        let energy: f64 = self.window.iter().map(|w| w * w).sum();
        let mut start = 0;
        while start + l <= x.len() {
            let mut seg: Vec<Complex64> = x[start..start + l]
                .iter()
                .zip(&self.window)
                .map(|(v, w)| v * w)
                .collect();
            self.fft.process(&mut seg);
            for (slot, &o) in self.offsets.iter().enumerate() {
                for m in 0..l {
                    let v = seg[m] * seg[(m + l - o) % l].conj() / energy;
                    self.sum[slot][m] += v;
                    self.sum_sq[slot][m] += v.norm_sqr();
                }
            }
            self.segments += 1;
            start += hop;
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn finish(&self) -> Result<CyclicSpectrumEstimate> {
        if self.segments < MIN_SEGMENTS {
            return Err(Error::InsufficientData(format!(
                "{} segments, at least {MIN_SEGMENTS} needed",
                self.segments
            )));
        }
        let count = self.segments as f64;
        let mut values = Vec::with_capacity(self.offsets.len());
        let mut std_errors = Vec::with_capacity(self.offsets.len());
        for (s, q) in self.sum.iter().zip(&self.sum_sq) {
            let mean: Vec<Complex64> = s.iter().map(|v| v / count).collect();
            let se = mean
                .iter()
                .zip(q)
                .map(|(m, &q)| ((q / count - m.norm_sqr()).max(0.0) / count).sqrt())
                .collect();
            values.push(mean);
            std_errors.push(se);
        }
        Ok(CyclicSpectrumEstimate {
            period: self.period,
            segment_len: self.segment_len,
            offsets: self.offsets.clone(),
            segments: self.segments,
            values,
            std_errors,
        })
    }
}

/// Averaged cyclic periodogram on the segment frequency grid `m / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSpectrumEstimate {
    pub period: usize,
    pub segment_len: usize,
    /// Bin offsets; offset `o` estimates the cycle frequency `o / L`.
    pub offsets: Vec<usize>,
    pub segments: usize,
    /// `values[slot][m]`: estimate at `f = m / L` for `offsets[slot]`.
    pub values: Vec<Vec<Complex64>>,
    pub std_errors: Vec<Vec<f64>>,
}

impl CyclicSpectrumEstimate {
    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 / self.segment_len as f64
    }

    fn slot(&self, offset: usize) -> Option<usize> {
        self.offsets.iter().position(|&o| o == offset)
    }

    /// Estimate of `S^(k/P)(m/L)` for `k = 0..P`.
    pub fn ridge(&self, k: usize) -> Option<&[Complex64]> {
        let slot = self.slot(k * self.segment_len / self.period)?;
        Some(&self.values[slot])
    }

    pub fn ridge_std_error(&self, k: usize) -> Option<&[f64]> {
        let slot = self.slot(k * self.segment_len / self.period)?;
        Some(&self.std_errors[slot])
    }

    pub fn at_offset(&self, offset: usize) -> Option<(&[Complex64], &[f64])> {
        let slot = self.slot(offset)?;
        Some((&self.values[slot], &self.std_errors[slot]))
    }

    /// Signed cycle index of the model value estimated by ridge `k` at bin
    /// `m`: `k`, or `k - P` when `f - k/P` wraps below zero.
    pub fn signed_cycle(&self, k: usize, bin: usize) -> i64 {
        if bin * self.period < k * self.segment_len {
            k as i64 - self.period as i64
        } else {
            k as i64
        }
    }
}

/// Averaged cyclic periodogram of one record at the cycle frequencies `k/P`.
pub fn estimate_cyclic_spectrum(
    x: &[Complex64],
    period: usize,
    segment_len: usize,
) -> Result<CyclicSpectrumEstimate> {
    let mut acc = CyclicPeriodogram::new(
        period,
        segment_len,
        CyclicPeriodogram::cycle_offsets(period, segment_len),
    )?;
    acc.accumulate(x);
    acc.finish()
}
