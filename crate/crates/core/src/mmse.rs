//! Asymptotic MMSE bounds for a cyclostationary signal in white noise.
//!
//! Everything here is evaluated from per-node eigenvalues of the signal's
//! cyclic PSD matrix. The observation matrix is `S_D + Pz I`, which shares
//! the eigenbasis of `S_D`, so one eigensolve per node serves every noise
//! level.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kl::{kl_decompose, subband_eigenvalues, LOG_FLOOR};
use crate::spectral::{
    assemble_cyclic_psd_matrix, CyclicPsdMatrix, CyclicSpectrumModel, FrequencyGrid, WithWhiteNoise,
};

/// Allowed deviation of the signal power from one.
pub const UNIT_POWER_TOLERANCE: f64 = 1e-6;

/// Relative threshold separating occupied from empty spectrum.
pub const BAND_THRESHOLD: f64 = 1e-12;

/// Default number of SNR nodes when averaging the smoothing MMSE.
pub const SNR_AVERAGE_NODES: usize = 512;

/// Unit-power signal observed in white noise of power `Pz`.
#[derive(Debug, Clone, Copy)]
pub struct AdditiveScenario<S> {
    signal: S,
    noise_power: f64,
}

impl<S: CyclicSpectrumModel> AdditiveScenario<S> {
    pub fn new(signal: S, noise_power: f64) -> Result<Self> {
        if !(noise_power > 0.0) || !noise_power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise power must be finite and > 0, got {noise_power}"
            )));
        }
        let power = signal.power();
        if (power - 1.0).abs() > UNIT_POWER_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "signal power must be 1, got {power}"
            )));
        }
        Ok(Self {
            signal,
            noise_power,
        })
    }

    pub fn from_snr(signal: S, snr: f64) -> Result<Self> {
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "SNR must be finite and > 0, got {snr}"
            )));
        }
        Self::new(signal, 1.0 / snr)
    }

    pub fn signal(&self) -> &S {
        &self.signal
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn snr(&self) -> f64 {
        1.0 / self.noise_power
    }

    pub fn period(&self) -> usize {
        self.signal.period()
    }

    /// The observed process `x = d + z`.
    pub fn observation(&self) -> WithWhiteNoise<&S> {
        WithWhiteNoise {
            signal: &self.signal,
            noise_power: self.noise_power,
        }
    }
}

/// Per-bin KL Wiener gains `lambda / (lambda + Pz)` at one sub-band frequency.
pub fn kl_wiener_gains<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    sigma: f64,
) -> Result<Vec<f64>> {
    let m = assemble_cyclic_psd_matrix(scenario.signal(), sigma)?;
    let pz = scenario.noise_power();
    Ok(kl_decompose(&m)?
        .eigenvalues
        .iter()
        .map(|&l| l / (l + pz))
        .collect())
}

/// Outcome of a prediction bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionBound {
    pub value: f64,
    /// The spectrum vanishes somewhere; the process is perfectly predictable.
    pub singular: bool,
}

/// Eigenvalue and PSD samples of a signal on one grid, reusable across noise
/// levels.
#[derive(Debug, Clone)]
pub struct SignalSpectrumTable {
    grid: FrequencyGrid,
    eigenvalues: Vec<Vec<f64>>,
    psd: Vec<f64>,
}

impl SignalSpectrumTable {
    pub fn new<S: CyclicSpectrumModel + ?Sized>(signal: &S, grid: &FrequencyGrid) -> Result<Self> {
        grid.require_quadrature()?;
        let eigenvalues = subband_eigenvalues(signal, grid)?;
        let psd = grid
            .lambda_nodes()
            .map(|l| signal.cyclic_value(0, l).re.max(0.0))
            .collect();
        Ok(Self {
            grid: *grid,
            eigenvalues,
            psd,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// `rows[i][p]`: rank-`p` signal eigenvalue at node `i`.
    pub fn eigenvalues(&self) -> &[Vec<f64>] {
        &self.eigenvalues
    }

    /// Signal PSD on the full-band grid.
    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    fn kl_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.eigenvalues.iter().flatten().map(|&l| g(l)).sum::<f64>() * self.grid.step()
    }

    fn cl_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.psd.iter().map(|&s| g(s)).sum::<f64>() * self.grid.step()
    }

    pub fn signal_power(&self) -> f64 {
        self.kl_integral(|l| l)
    }

    pub fn mmse_noncausal(&self, noise_power: f64) -> f64 {
        self.kl_integral(|l| l * noise_power / (l + noise_power))
    }

    pub fn mmse_noncausal_wss(&self, noise_power: f64) -> f64 {
        self.cl_integral(|s| s * noise_power / (s + noise_power))
    }

    pub fn mmse_causal(&self, snr: f64) -> f64 {
        self.kl_integral(|l| (snr * l).ln_1p()) / snr
    }

    pub fn mmse_causal_wss(&self, snr: f64) -> f64 {
        self.cl_integral(|s| (snr * s).ln_1p()) / snr
    }

    pub fn mmse_prediction(&self, noise_power: f64) -> PredictionBound {
        exp_log_integral(self.eigenvalues.iter().flatten().copied(), noise_power, self.grid.step())
    }

    pub fn mmse_prediction_wss(&self, noise_power: f64) -> PredictionBound {
        exp_log_integral(self.psd.iter().copied(), noise_power, self.grid.step())
    }

    /// Causal MMSE as the SNR-average of the smoothing MMSE (midpoint rule).
    pub fn mmse_causal_by_snr_average(&self, snr: f64, nodes: usize) -> f64 {
        let h = snr / nodes as f64;
        let acc: f64 = (0..nodes)
            .map(|i| {
                let gamma = (i as f64 + 0.5) * h;
                self.mmse_noncausal(1.0 / gamma)
            })
            .sum();
        acc * h / snr
    }

    /// Measure of the KL band where the signal exceeds `1e-12` of its peak.
    pub fn occupied_band(&self) -> f64 {
        let peak = self
            .eigenvalues
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b));
        let count = self
            .eigenvalues
            .iter()
            .flatten()
            .filter(|&&l| l > BAND_THRESHOLD * peak)
            .count();
        count as f64 / self.grid.full_band_len() as f64
    }

    pub fn sync_gains(&self, noise_power: f64) -> SyncGains {
        let snr = 1.0 / noise_power;
        SyncGains {
            zeta_nc: self.mmse_noncausal(noise_power) / self.mmse_noncausal_wss(noise_power),
            zeta_c: self.mmse_causal(snr) / self.mmse_causal_wss(snr),
            zeta_p: self.mmse_prediction(noise_power).value
                / self.mmse_prediction_wss(noise_power).value,
        }
    }

    pub fn report(&self, noise_power: f64) -> MmseReport {
        let snr = 1.0 / noise_power;
        let mmse_nc = self.mmse_noncausal(noise_power);
        let mmse_c = self.mmse_causal(snr);
        let mmse_p = self.mmse_prediction(noise_power).value;
        let mmse_nc_wss = self.mmse_noncausal_wss(noise_power);
        let mmse_c_wss = self.mmse_causal_wss(snr);
        let mmse_p_wss = self.mmse_prediction_wss(noise_power).value;
        MmseReport {
            snr,
            mmse_nc,
            mmse_c,
            mmse_p,
            mmse_nc_wss,
            mmse_c_wss,
            mmse_p_wss,
            zeta_nc: mmse_nc / mmse_nc_wss,
            zeta_c: mmse_c / mmse_c_wss,
            zeta_p: mmse_p / mmse_p_wss,
        }
    }
}

fn exp_log_integral(values: impl Iterator<Item = f64>, offset: f64, step: f64) -> PredictionBound {
    let mut acc = 0.0;
    for v in values {
        let s = v + offset;
        if s < LOG_FLOOR {
            return PredictionBound {
                value: 0.0,
                singular: true,
            };
        }
        acc += s.ln();
    }
    PredictionBound {
        value: (acc * step).exp(),
        singular: false,
    }
}

pub fn mmse_noncausal<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.mmse_noncausal(scenario.noise_power()))
}

pub fn mmse_noncausal_wss<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.mmse_noncausal_wss(scenario.noise_power()))
}

pub fn mmse_causal<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.mmse_causal(scenario.snr()))
}

pub fn mmse_causal_wss<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.mmse_causal_wss(scenario.snr()))
}

/// One-step prediction bound `exp int ln|S_X(sigma)| d sigma` of any model.
pub fn mmse_prediction<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    grid: &FrequencyGrid,
) -> Result<PredictionBound> {
    Ok(SignalSpectrumTable::new(model, grid)?.mmse_prediction(0.0))
}

/// Kolmogorov-Szego baseline `exp int ln S_X(f) df` over the full band.
pub fn mmse_prediction_wss<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    grid: &FrequencyGrid,
) -> Result<PredictionBound> {
    grid.require_quadrature()?;
    let psd = grid.lambda_nodes().map(|l| model.cyclic_value(0, l).re);
    Ok(exp_log_integral(psd, 0.0, grid.step()))
}

/// Ratio of synchronous to WSS-treatment MMSE for each mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncGains {
    pub zeta_nc: f64,
    pub zeta_c: f64,
    pub zeta_p: f64,
}

pub fn sync_gains<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<SyncGains> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.sync_gains(scenario.noise_power()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseReport {
    pub snr: f64,
    pub mmse_nc: f64,
    pub mmse_c: f64,
    pub mmse_p: f64,
    pub mmse_nc_wss: f64,
    pub mmse_c_wss: f64,
    pub mmse_p_wss: f64,
    pub zeta_nc: f64,
    pub zeta_c: f64,
    pub zeta_p: f64,
}

pub fn mmse_report<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<MmseReport> {
    Ok(SignalSpectrumTable::new(scenario.signal(), grid)?.report(scenario.noise_power()))
}

/// Coherence matrix `S_D^{1/2} S_X^{-1/2}` between signal and observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceMatrix {
    pub sigma: f64,
    pub entries: DMatrix<Complex64>,
}

impl CoherenceMatrix {
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.entries.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

/// `f(A)` for a Hermitian matrix through its eigendecomposition.
fn hermitian_function(a: &DMatrix<Complex64>, f: impl Fn(f64) -> f64, sigma: f64) -> Result<DMatrix<Complex64>> {
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(herm, 1e-15, 10_000).ok_or(Error::EigensolveFailure { sigma })?;
    let mut scaled = eig.eigenvectors.clone();
    for (p, &l) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(p).scale_mut(f(l));
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

fn observation_matrix(signal: &CyclicPsdMatrix, noise_power: f64) -> DMatrix<Complex64> {
    let n = signal.period();
    &signal.entries + DMatrix::<Complex64>::identity(n, n) * Complex64::new(noise_power, 0.0)
}

pub fn coherence_matrix<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    sigma: f64,
) -> Result<CoherenceMatrix> {
    let sd = assemble_cyclic_psd_matrix(scenario.signal(), sigma)?;
    let sx = observation_matrix(&sd, scenario.noise_power());
    let sd_half = hermitian_function(&sd.entries, |l| l.max(0.0).sqrt(), sigma)?;
    let sx_inv_half = hermitian_function(
        &sx,
        |l| {
            if l > 0.0 {
                1.0 / l.sqrt()
            } else {
                f64::INFINITY
            }
        },
        sigma,
    )?;
    if sx_inv_half.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(CoherenceMatrix {
        sigma,
        entries: sd_half * sx_inv_half,
    })
}

/// Non-causal MMSE as `int tr[S_D (I - C C^H)] d sigma` with explicit matrices.
pub fn mmse_noncausal_via_coherence<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    grid.require_quadrature()?;
    let n = scenario.period();
    let terms: Vec<f64> = (0..grid.points_per_subband())
        .into_par_iter()
        .map(|i| {
            let sigma = grid.sigma(i);
            let sd = assemble_cyclic_psd_matrix(scenario.signal(), sigma)?;
            let c = coherence_matrix(scenario, sigma)?.entries;
            let residual = DMatrix::<Complex64>::identity(n, n) - &c * c.adjoint();
            Ok((&sd.entries * residual).trace().re)
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<f64>() * grid.step())
}

/// Error cyclic PSD matrix of the non-causal filter, `Pz S_D (S_D + Pz I)^{-1}`.
pub fn error_cyclic_psd<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    sigma: f64,
) -> Result<CyclicPsdMatrix> {
    let sd = assemble_cyclic_psd_matrix(scenario.signal(), sigma)?;
    let pz = scenario.noise_power();
    let sx = observation_matrix(&sd, pz);
    let chol = sx.cholesky().ok_or(Error::SingularMatrix)?;
    // S_X Y = S_D, so S_D S_X^{-1} = Y^H.
    let y = chol.solve(&sd.entries);
    let e = y.adjoint() * Complex64::new(pz, 0.0);
    let entries = (&e + e.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(CyclicPsdMatrix { sigma, entries })
}

/// `zeta_p` from the log-determinant of the normalised matrix
/// `D^{-1/2} S_X D^{-1/2}`, `D` the diagonal of `S_X`.
pub fn zeta_p_via_coherence<S: CyclicSpectrumModel>(
    scenario: &AdditiveScenario<S>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    grid.require_quadrature()?;
    let observed = scenario.observation();
    let terms: Vec<f64> = (0..grid.points_per_subband())
        .into_par_iter()
        .map(|i| {
            let sigma = grid.sigma(i);
            let sx = assemble_cyclic_psd_matrix(&observed, sigma)?.entries;
            let scale: Vec<f64> = sx.diagonal().iter().map(|z| 1.0 / z.re.sqrt()).collect();
            let n = scale.len();
            let c = DMatrix::from_fn(n, n, |r, k| sx[(r, k)] * (scale[r] * scale[k]));
            let chol = c.cholesky().ok_or(Error::NotPositiveDefinite { order: n })?;
            Ok(2.0 * chol.l().diagonal().iter().map(|z| z.re.ln()).sum::<f64>())
        })
        .collect::<Result<_>>()?;
    Ok((terms.iter().sum::<f64>() * grid.step()).exp())
}

/// Filtering mode of an MMSE bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    NonCausal,
    Causal,
    Prediction,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::NonCausal, Mode::Causal, Mode::Prediction];

    pub fn name(self) -> &'static str {
        match self {
            Mode::NonCausal => "noncausal",
            Mode::Causal => "causal",
            Mode::Prediction => "prediction",
        }
    }
}

/// Leading-order high-SNR decay for a signal occupying a KL band of measure
/// `band`: `B/SNR`, `B ln(SNR)/SNR` and `SNR^{-(1-B)}`.
pub fn high_snr_asymptote(mode: Mode, band: f64, snr: f64) -> Result<f64> {
    if !(band > 0.0 && band <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "occupied band must lie in (0, 1], got {band}"
        )));
    }
    if !(snr > 0.0) {
        return Err(Error::InvalidParameter(format!("SNR must be > 0, got {snr}")));
    }
    Ok(match mode {
        Mode::NonCausal => band / snr,
        Mode::Causal => band * snr.ln() / snr,
        Mode::Prediction => snr.powf(band - 1.0),
    })
}

pub fn occupied_band<M: CyclicSpectrumModel + ?Sized>(signal: &M, grid: &FrequencyGrid) -> Result<f64> {
    Ok(SignalSpectrumTable::new(signal, grid)?.occupied_band())
}
