//! Square-root raised-cosine PAM with a random fractional delay, in white noise.
//!
//! The transmitted signal is `d(n) = sum_k a(k) b(n - kP)` with uncorrelated
//! symbols of power `P` and a 100% excess-bandwidth SRRC pulse whose DTFT is
//! `B(f) = sqrt(P) cos(pi P f / 2)` on `[-1/P, 1/P)`. The observation is
//! `x(n) = d(n - eps) + z(n)` with `eps ~ U[0, delta)`.
//!
//! The delay multiplies the CL increments at `f in [0, 1)` by
//! `exp(-j 2 pi f eps)`, so the correlation between bins `sigma + r/P` and
//! `sigma + c/P` picks up `E[exp(-j 2 pi (r - c) eps / P)]`, the smear factor.
//! At `delta = P/(P-1)` the smear vanishes for the only overlapping pair
//! (`|r - c| = P - 1`) and the signal becomes WSS.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{CyclicSpectrumModel, WithWhiteNoise};

/// 1-periodic SRRC frequency response, supported on `[0, 1/P) U (1 - 1/P, 1)`.
pub fn pulse_frequency_response(period: usize, f: f64) -> Complex64 {
    let p = period as f64;
    let g = f.rem_euclid(1.0);
    let edge = 1.0 / p;
    let centered = if g < edge {
        g
    } else if g > 1.0 - edge {
        g - 1.0
    } else {
        return Complex64::new(0.0, 0.0);
    };
    Complex64::new(p.sqrt() * (0.5 * PI * p * centered).cos(), 0.0)
}

/// `E[exp(-j 2 pi k eps / P)]` for `eps ~ U[0, delta)`.
///
/// Evaluated as `exp(-j theta/2) sin(theta/2) / (theta/2)` with
/// `theta = 2 pi delta k / P`, which has no 0/0 at `k = 0` or `delta = 0`.
pub fn smear_factor(period: usize, k: i64, delta: f64) -> Complex64 {
    let half = PI * delta * k as f64 / period as f64;
    if half == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(half.sin() / half, -half)
}

/// Signal part of the cyclic spectrum: `B(f) conj(B(f - k/P)) smear(k)`.
pub fn pam_cyclic_value(period: usize, delta: f64, k: i64, f: f64) -> Complex64 {
    let shifted = f - k as f64 / period as f64;
    let prod = pulse_frequency_response(period, f) * pulse_frequency_response(period, shifted).conj();
    if prod == Complex64::new(0.0, 0.0) {
        return prod;
    }
    prod * smear_factor(period, k, delta)
}

/// Unit-power SRRC PAM signal with maximum delay `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrrcPam {
    period: usize,
    delta: f64,
}

impl SrrcPam {
    pub fn new(period: usize, delta: f64) -> Result<Self> {
        if period < 2 {
            return Err(Error::InvalidParameter(format!(
                "PAM period must be at least 2, got {period}"
            )));
        }
        let max = Self::wss_delta(period);
        if !(delta >= 0.0 && delta <= max * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in [0, {max}], got {delta}"
            )));
        }
        Ok(Self {
            period,
            delta: delta.min(max),
        })
    }

    /// The delay `P/(P-1)` at which the signal becomes WSS.
    pub fn wss_delta(period: usize) -> f64 {
        period as f64 / (period as f64 - 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl CyclicSpectrumModel for SrrcPam {
    fn period(&self) -> usize {
        self.period
    }

    fn cyclic_value(&self, k: i64, f: f64) -> Complex64 {
        pam_cyclic_value(self.period, self.delta, k, f)
    }

    fn power(&self) -> f64 {
        1.0
    }
}

/// Observation model `x(n) = d(n - eps) + z(n)`.
pub fn composite_model(signal: SrrcPam, noise_power: f64) -> Result<WithWhiteNoise<SrrcPam>> {
    WithWhiteNoise::new(signal, noise_power)
}

/// Time-domain SRRC taps `b(n)` for `|n| <= half_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    taps: Vec<f64>,
    half_length: usize,
}

impl Pulse {
    pub fn half_length(&self) -> usize {
        self.half_length
    }

    /// Tap `b(n)`; zero outside the truncation window.
    pub fn tap(&self, n: i64) -> f64 {
        let l = self.half_length as i64;
        if n < -l || n > l {
            0.0
        } else {
            self.taps[(n + l) as usize]
        }
    }

    /// Taps from `b(-L)` to `b(L)`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|b| b * b).sum()
    }
}

/// Inverse DTFT of the SRRC response by midpoint quadrature, truncated to `|n| <= L`.
///
/// Fails with [`Error::TruncationError`] when the energy left outside the
/// window exceeds `1e-6`.
pub fn pulse_time_taps(period: usize, half_length: usize) -> Result<Pulse> {
    if period < 2 {
        return Err(Error::InvalidParameter(format!(
            "PAM period must be at least 2, got {period}"
        )));
    }
    if half_length < 8 * period {
        return Err(Error::InvalidParameter(format!(
            "pulse half-length must be at least 8P = {}, got {half_length}",
            8 * period
        )));
    }
    let p = period as f64;
    let nodes = 4096.max(32 * half_length);
    let width = 2.0 / p;
    let h = width / nodes as f64;
    let response: Vec<(f64, f64)> = (0..nodes)
        .map(|i| {
            let f = -1.0 / p + (i as f64 + 0.5) * h;
            (f, p.sqrt() * (0.5 * PI * p * f).cos())
        })
        .collect();
    let l = half_length as i64;
    // B is real and even, so b(n) is real and even.
    let half: Vec<f64> = (0..=l)
        .map(|n| {
            response
                .iter()
                .map(|&(f, b)| b * (2.0 * PI * f * n as f64).cos())
                .sum::<f64>()
                * h
        })
        .collect();
    let taps: Vec<f64> = (-l..=l).map(|n| half[n.unsigned_abs() as usize]).collect();
    let pulse = Pulse {
        taps,
        half_length,
    };
    let tail_energy = 1.0 - pulse.energy();
    if tail_energy > 1e-6 {
        return Err(Error::TruncationError { tail_energy });
    }
    Ok(pulse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{assemble_cyclic_psd_matrix, integrate_subband, FrequencyGrid};

    #[test]
    fn frequency_response_samples() {
        assert!((pulse_frequency_response(4, 0.0).re - 2.0).abs() < 1e-15);
        assert_eq!(pulse_frequency_response(4, 0.25).re, 0.0);
        assert!((pulse_frequency_response(4, 1.0 - 1.0 / 8.0).re - 2f64.sqrt()).abs() < 1e-14);
        assert!((pulse_frequency_response(4, -1.0 / 8.0).re - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(pulse_frequency_response(4, 0.5).re, 0.0);
    }

    #[test]
    fn smear_factor_values() {
        assert_eq!(smear_factor(4, 0, 1.3), Complex64::new(1.0, 0.0));
        assert_eq!(smear_factor(4, 2, 0.0), Complex64::new(1.0, 0.0));
        assert!(smear_factor(4, 3, 4.0 / 3.0).norm() < 1e-15);
        assert!(smear_factor(4, -3, 4.0 / 3.0).norm() < 1e-15);
        let expected = (PI / 3.0).sin() / (PI / 3.0);
        assert!((smear_factor(4, 1, 4.0 / 3.0).norm() - expected).abs() < 1e-15);
        assert!((expected - 0.8270).abs() < 5e-5);
        // direct form (1 - e^{-j theta}) / (j theta)
        let theta = 2.0 * PI * 0.7 * 2.0 / 4.0;
        let direct = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -theta))
            / Complex64::new(0.0, theta);
        assert!((smear_factor(4, 2, 0.7) - direct).norm() < 1e-15);
        assert!((smear_factor(4, -2, 0.7) - direct.conj()).norm() < 1e-15);
    }

    #[test]
    fn smear_is_continuous_at_zero_delay() {
        for k in -3..=3 {
            let near = smear_factor(4, k, 1e-9);
            assert!((near - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn cyclic_value_examples() {
        let s = SrrcPam::new(4, 0.0).unwrap();
        assert!((s.cyclic_value(-3, 0.125).re - 2.0).abs() < 1e-14);
        let z = SrrcPam::new(4, 4.0 / 3.0).unwrap();
        for f in [0.0, 0.1, 0.2, 0.8, 0.9] {
            assert_eq!(s.cyclic_value(0, f), z.cyclic_value(0, f));
        }
        // k = 2: supports of B(f) and B(f - 1/2) never overlap
        for i in 0..100 {
            let f = i as f64 / 100.0;
            assert_eq!(s.cyclic_value(2, f), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn composite_peak_and_wss_limit() {
        let x = composite_model(SrrcPam::new(4, 0.0).unwrap(), 1.0).unwrap();
        assert!((x.cyclic_value(0, 0.0).re - 5.0).abs() < 1e-14);
        let w = composite_model(SrrcPam::new(4, 4.0 / 3.0).unwrap(), 1.0).unwrap();
        let g = FrequencyGrid::new(4, 64).unwrap();
        for s in g.sigma_nodes() {
            let m = assemble_cyclic_psd_matrix(&w, s).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(m.entries[(r, c)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn noiseless_matrix_has_rank_at_most_two() {
        let s = SrrcPam::new(4, 0.9).unwrap();
        let g = FrequencyGrid::new(4, 16).unwrap();
        for sigma in g.sigma_nodes() {
            let m = assemble_cyclic_psd_matrix(&s, sigma).unwrap();
            let sv = m.entries.clone().singular_values();
            let big = sv.iter().filter(|&&v| v > 1e-12).count();
            assert!(big <= 2);
        }
    }

    #[test]
    fn unit_signal_power_for_every_delta() {
        let g = FrequencyGrid::new(4, 256).unwrap();
        for i in 0..=8 {
            let s = SrrcPam::new(4, i as f64 / 8.0 * 4.0 / 3.0).unwrap();
            let p = integrate_subband(|sg| assemble_cyclic_psd_matrix(&s, sg).unwrap().trace(), &g)
                .unwrap();
            assert!((p - 1.0).abs() < 1e-6, "{p}");
        }
    }

    #[test]
    fn delta_range_is_enforced() {
        assert!(SrrcPam::new(4, -0.1).is_err());
        assert!(SrrcPam::new(4, 1.34).is_err());
        assert!(SrrcPam::new(1, 0.0).is_err());
        assert!(SrrcPam::new(4, 4.0 / 3.0).is_ok());
    }

    #[test]
    fn pulse_taps_center_and_energy() {
        let b = pulse_time_taps(4, 128).unwrap();
        assert!((b.tap(0) - 2.0 / PI).abs() < 1e-7);
        assert!((b.energy() - 1.0).abs() < 1e-6);
        for n in 1..=128 {
            assert!((b.tap(n) - b.tap(-n)).abs() < 1e-9);
        }
        for p in [2usize, 3, 8] {
            let b = pulse_time_taps(p, 32 * p).unwrap();
            assert!((b.tap(0) - 4.0 / (PI * (p as f64).sqrt())).abs() < 1e-7, "P = {p}");
        }
    }

    #[test]
    fn short_pulse_truncation_is_reported() {
        assert!(matches!(pulse_time_taps(4, 8), Err(Error::InvalidParameter(_))));
        assert!(matches!(pulse_time_taps(4, 32), Err(Error::TruncationError { .. })));
    }
}
