use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kl::kl_decompose;
use crate::mmse::AdditiveScenario;
use crate::spectral::{assemble_cyclic_psd_matrix, CyclicSpectrumModel};

/// Frequency-shift filter bank realising the cyclic Wiener filter on an
/// `n_dft`-point grid.
///
/// The output spectrum is `sum_q H_q[m] X[m + q n_dft / P]`, i.e. branch `q`
/// filters the input shifted down by `q/P`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreshFilterBank {
    period: usize,
    n_dft: usize,
    branches: Vec<Vec<Complex64>>,
}

impl FreshFilterBank {
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n_dft(&self) -> usize {
        self.n_dft
    }

    /// Frequency response of branch `q`.
    pub fn branch(&self, q: usize) -> &[Complex64] {
        &self.branches[q]
    }
}

fn check_dft_size(period: usize, n_dft: usize) -> Result<()> {
    if n_dft == 0 || n_dft % period != 0 {
        return Err(Error::InvalidParameter(format!(
            "DFT size must be a positive multiple of P = {period}, got {n_dft}"
        )));
    }
    Ok(())
}

/// Cyclic Wiener filter from per-bin solves of `(S_D + Pz I) Y = S_D`.
pub fn design_cwf<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    n_dft: usize,
) -> Result<FreshFilterBank> {
    let period = scenario.period();
    check_dft_size(period, n_dft)?;
    let stride = n_dft / period;
    let pz = scenario.noise_power();
    let per_bin: Vec<DMatrix<Complex64>> = (0..stride)
        .into_par_iter()
        .map(|i| {
            let sd = assemble_cyclic_psd_matrix(scenario.signal(), i as f64 / n_dft as f64)?;
            let sx = &sd.entries
                + DMatrix::<Complex64>::identity(period, period) * Complex64::new(pz, 0.0);
            let chol = sx.cholesky().ok_or(Error::SingularMatrix)?;
            Ok(chol.solve(&sd.entries).adjoint())
        })
        .collect::<Result<_>>()?;
    let mut branches = vec![vec![Complex64::new(0.0, 0.0); n_dft]; period];
    for (i, w) in per_bin.iter().enumerate() {
        for p in 0..period {
            for (q, branch) in branches.iter_mut().enumerate() {
                branch[i + p * stride] = w[(p, (p + q) % period)];
            }
        }
    }
    Ok(FreshFilterBank {
        period,
        n_dft,
        branches,
    })
}

fn check_blocks(len: usize, n_dft: usize) -> Result<()> {
    if len % n_dft != 0 {
        return Err(Error::LengthMismatch {
            expected: n_dft * (len / n_dft + 1),
            actual: len,
        });
    }
    Ok(())
}

/// Runs the filter bank over circular blocks of `n_dft` samples.
pub fn apply_fresh(bank: &FreshFilterBank, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = bank.n_dft;
    check_blocks(x.len(), n)?;
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let step = -2.0 * std::f64::consts::PI / bank.period as f64;
    let mut out = Vec::with_capacity(x.len());
    for (b, block) in x.chunks_exact(n).enumerate() {
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for (q, response) in bank.branches.iter().enumerate() {
            let mut shifted: Vec<Complex64> = block
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let t = ((b * n + j) * q) % bank.period;
                    v * Complex64::from_polar(1.0, step * t as f64)
                })
                .collect();
            forward.process(&mut shifted);
            for ((a, s), h) in acc.iter_mut().zip(&shifted).zip(response) {
                *a += s * h;
            }
        }
        inverse.process(&mut acc);
        let scale = 1.0 / n as f64;
        out.extend(acc.into_iter().map(|v| v * scale));
    }
    Ok(out)
}

/// Wiener filtering in the KL domain: each `P`-vector of DFT bins spaced
/// `n_dft/P` apart is rotated into the signal eigenbasis, scaled by
/// `lambda / (lambda + Pz)` and rotated back.
pub fn apply_kl_wiener<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    x: &[Complex64],
    n_dft: usize,
) -> Result<Vec<Complex64>> {
    let period = scenario.period();
    check_dft_size(period, n_dft)?;
    check_blocks(x.len(), n_dft)?;
    let stride = n_dft / period;
    let pz = scenario.noise_power();
    let operators: Vec<DMatrix<Complex64>> = (0..stride)
        .into_par_iter()
        .map(|i| {
            let sd = assemble_cyclic_psd_matrix(scenario.signal(), i as f64 / n_dft as f64)?;
            let kl = kl_decompose(&sd)?;
            let gains: Vec<f64> = kl.eigenvalues.iter().map(|&l| l / (l + pz)).collect();
            Ok(kl.reconstruct_with(&gains))
        })
        .collect::<Result<_>>()?;

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n_dft);
    let inverse = planner.plan_fft_inverse(n_dft);
    let mut out = Vec::with_capacity(x.len());
    for block in x.chunks_exact(n_dft) {
        let mut spec = block.to_vec();
        forward.process(&mut spec);
        let mut filtered = vec![Complex64::new(0.0, 0.0); n_dft];
        for (i, op) in operators.iter().enumerate() {
            let v = DVector::from_fn(period, |r, _| spec[i + r * stride]);
            let y = op * v;
            for r in 0..period {
                filtered[i + r * stride] = y[r];
            }
        }
        inverse.process(&mut filtered);
        let scale = 1.0 / n_dft as f64;
        out.extend(filtered.into_iter().map(|v| v * scale));
    }
    Ok(out)
}

/// Mean `|reference - estimate|^2`, skipping `edge_discard` samples at each end.
pub fn empirical_mse(reference: &[Complex64], estimate: &[Complex64], edge_discard: usize) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    if 2 * edge_discard >= reference.len() {
        return Err(Error::InsufficientData(format!(
            "discarding {edge_discard} samples per side leaves nothing of {}",
            reference.len()
        )));
    }
    let kept = &reference[edge_discard..reference.len() - edge_discard];
    let est = &estimate[edge_discard..estimate.len() - edge_discard];
    Ok(kept
        .iter()
        .zip(est)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / kept.len() as f64)
}

/// `max |a - b| / max |a|`.
pub fn max_relative_difference(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let scale = a.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let diff = a
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(diff);
    }
    Ok(diff / scale)
}
