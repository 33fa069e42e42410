use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::models::{pulse_time_taps, Pulse, SrrcPam};
use crate::spectral::CyclicSpectrumModel;

/// Largest predictor order accepted.
pub const MAX_ORDER: usize = 512;

/// Pulse half-length used for time-domain kernels, in periods.
pub const PULSE_PERIODS: usize = 32;

/// Autocorrelation `r(n, m) = E[x(n + m) x*(n)]` of the undelayed PAM
/// observation built from truncated pulse taps.
#[derive(Debug, Clone)]
pub struct PamKernel {
    period: usize,
    pulse: Pulse,
    noise_power: f64,
}

impl PamKernel {
    /// Only `delta = 0` has a closed time-domain kernel.
    pub fn new(model: &SrrcPam, noise_power: f64) -> Result<Self> {
        if model.delta() != 0.0 {
            return Err(Error::UnsupportedDelay {
                delta: model.delta(),
            });
        }
        if !(noise_power >= 0.0) || !noise_power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise power must be finite and >= 0, got {noise_power}"
            )));
        }
        let period = model.period();
        Ok(Self {
            period,
            pulse: pulse_time_taps(period, PULSE_PERIODS * period)?,
            noise_power,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn pulse(&self) -> &Pulse {
        &self.pulse
    }

    /// `P sum_k b(n + m - kP) b(n - kP) + Pz delta_m`.
    pub fn value(&self, n: i64, m: i64) -> f64 {
        let p = self.period as i64;
        let l = self.pulse.half_length() as i64;
        // b(n - kP) != 0 needs |n - kP| <= L.
        let k_lo = (n - l).div_euclid(p);
        let k_hi = (n + l).div_euclid(p) + 1;
        let mut acc = 0.0;
        for k in k_lo..=k_hi {
            acc += self.pulse.tap(n + m - k * p) * self.pulse.tap(n - k * p);
        }
        let mut r = p as f64 * acc;
        if m == 0 {
            r += self.noise_power;
        }
        r
    }
}

pub fn autocorrelation_kernel(model: &SrrcPam, noise_power: f64, n: i64, m: i64) -> Result<f64> {
    Ok(PamKernel::new(model, noise_power)?.value(n, m))
}

/// One-step linear predictor of `x(n)` from `x(n-1), ..., x(n-N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePredictor {
    pub order: usize,
    /// Phase `n mod P` of the predicted sample.
    pub phase: usize,
    /// Weights on `x(n-1), ..., x(n-N)`.
    pub coefficients: Vec<f64>,
    pub mmse: f64,
}

struct Factored {
    lower: DMatrix<f64>,
    projected: Vec<f64>,
    variance: f64,
}

fn factor(kernel: &PamKernel, max_order: usize, phase: usize) -> Result<Factored> {
    if max_order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "predictor order {max_order} exceeds {MAX_ORDER}"
        )));
    }
    let n = phase as i64;
    let variance = kernel.value(n, 0);
    if max_order == 0 {
        return Ok(Factored {
            lower: DMatrix::zeros(0, 0),
            projected: Vec::new(),
            variance,
        });
    }
    // Past vector u_i = x(n - 1 - i): E[u_i u_j*] = r(n - 1 - j, j - i).
    let gram = DMatrix::from_fn(max_order, max_order, |i, j| {
        kernel.value(n - 1 - j as i64, j as i64 - i as i64)
    });
    let cross: Vec<f64> = (0..max_order).map(|i| kernel.value(n, -1 - i as i64)).collect();
    let chol = gram
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { order: max_order })?;
    let lower = chol.unpack();
    let mut projected = vec![0.0; max_order];
    for i in 0..max_order {
        let mut s = cross[i];
        for (j, y) in projected.iter().enumerate().take(i) {
            s -= lower[(i, j)] * y;
        }
        let pivot = lower[(i, i)];
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { order: i + 1 });
        }
        projected[i] = s / pivot;
    }
    Ok(Factored {
        lower,
        projected,
        variance,
    })
}

/// Finite-order prediction MMSE for orders `0..=max_order` at one phase.
///
/// Nested orders share one Cholesky factor of the past Gram matrix, so entry
/// `N` is `r(n, 0) - sum_{i<N} |y_i|^2` with `y = L^{-1} r`.
pub fn finite_prediction_mmse_sequence(
    kernel: &PamKernel,
    max_order: usize,
    phase: usize,
) -> Result<Vec<f64>> {
    let f = factor(kernel, max_order, phase)?;
    let mut out = Vec::with_capacity(max_order + 1);
    let mut acc = f.variance;
    out.push(acc);
    for y in &f.projected {
        acc -= y * y;
        out.push(acc);
    }
    Ok(out)
}

pub fn finite_prediction_mmse(kernel: &PamKernel, order: usize, phase: usize) -> Result<f64> {
    Ok(*finite_prediction_mmse_sequence(kernel, order, phase)?
        .last()
        .expect("sequence has order + 1 entries"))
}

/// Geometric mean over the `P` phases of the order-`N` prediction MMSE,
/// for every `N` up to `max_order`.
pub fn phase_geometric_mean_sequence(kernel: &PamKernel, max_order: usize) -> Result<Vec<f64>> {
    let p = kernel.period();
    let per_phase: Vec<Vec<f64>> = (0..p)
        .map(|phase| finite_prediction_mmse_sequence(kernel, max_order, phase))
        .collect::<Result<_>>()?;
    Ok((0..=max_order)
        .map(|order| {
            let log: f64 = per_phase.iter().map(|s| s[order].ln()).sum();
            (log / p as f64).exp()
        })
        .collect())
}

impl FinitePredictor {
    pub fn design(kernel: &PamKernel, order: usize, phase: usize) -> Result<Self> {
        let f = factor(kernel, order, phase)?;
        // Solve L^H w = y.
        let mut coefficients = vec![0.0; order];
        for i in (0..order).rev() {
            let mut s = f.projected[i];
            for (j, w) in coefficients.iter().enumerate().skip(i + 1) {
                s -= f.lower[(j, i)] * w;
            }
            coefficients[i] = s / f.lower[(i, i)];
        }
        let mmse = f.variance - f.projected.iter().map(|y| y * y).sum::<f64>();
        Ok(Self {
            order,
            phase: phase % kernel.period(),
            coefficients,
            mmse,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel() -> PamKernel {
        PamKernel::new(&SrrcPam::new(4, 0.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn delayed_model_is_rejected() {
        let m = SrrcPam::new(4, 0.5).unwrap();
        assert!(matches!(PamKernel::new(&m, 1.0), Err(Error::UnsupportedDelay { .. })));
    }

    #[test]
    fn kernel_is_periodic_and_has_unit_power() {
        let k = kernel();
        let avg: f64 = (0..4).map(|n| k.value(n, 0)).sum::<f64>() / 4.0;
        assert!((avg - 2.0).abs() < 1e-6);
        for n in -3..5 {
            for m in -9..9 {
                assert_eq!(k.value(n + 4, m), k.value(n, m));
            }
        }
        assert_eq!(k.value(0, 2 * 128 + 1), 0.0);
    }

    #[test]
    fn kernel_is_hermitian_in_lag() {
        let k = kernel();
        for n in 0..4 {
            for m in 1..12 {
                assert!((k.value(n, m) - k.value(n + m, -m)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn order_zero_is_variance_and_sequence_decreases() {
        let k = kernel();
        for phase in 0..4 {
            let s = finite_prediction_mmse_sequence(&k, 32, phase).unwrap();
            assert!((s[0] - k.value(phase as i64, 0)).abs() < 1e-15);
            assert!(s.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }

    #[test]
    fn predictor_weights_reproduce_mmse() {
        let k = kernel();
        let order = 12;
        let pred = FinitePredictor::design(&k, order, 1).unwrap();
        let n = 1i64;
        // MMSE = r(n,0) - sum_i w_i r(n, -1-i)
        let direct = k.value(n, 0)
            - pred
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, w)| w * k.value(n, -1 - i as i64))
                .sum::<f64>();
        assert!((direct - pred.mmse).abs() < 1e-10);
        let seq = finite_prediction_mmse(&k, order, 1).unwrap();
        assert!((seq - pred.mmse).abs() < 1e-12);
    }

    #[test]
    fn order_limit() {
        assert!(finite_prediction_mmse_sequence(&kernel(), MAX_ORDER + 1, 0).is_err());
    }
}
