//! Karhunen-Loeve spectrum of cyclostationary processes.
//!
//! The KL eigenbasis at sub-band frequency `sigma` is the eigenbasis of the
//! cyclic PSD matrix, and its eigenvalues are the KL-PSD samples. Eigenvalue
//! rank `p` (descending) is laid out on the sub-band `[p/P, (p+1)/P)` of the
//! full KL band.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{
    assemble_cyclic_psd_matrix, CyclicPsdMatrix, CyclicSpectrumModel, FrequencyGrid, PSD_TOLERANCE,
};

/// Eigenvalues below this are treated as zero inside logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

const EIG_TOLERANCE: f64 = 1e-15;
const EIG_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct KlDecomposition {
    pub sigma: f64,
    /// KL-PSD samples, descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary basis; column `p` pairs with `eigenvalues[p]`.
    pub basis: DMatrix<Complex64>,
}

impl KlDecomposition {
    /// `B diag(values) B^H`.
    pub fn reconstruct_with(&self, values: &[f64]) -> DMatrix<Complex64> {
        let mut scaled = self.basis.clone();
        for (p, &v) in values.iter().enumerate() {
            scaled.column_mut(p).scale_mut(v);
        }
        scaled * self.basis.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.reconstruct_with(&self.eigenvalues)
    }
}

/// Eigendecomposition of a cyclic PSD matrix.
///
/// Eigenvalues come out descending; values within `-1e-10` (relative) of zero
/// are clamped to zero. Each eigenvector is rotated so that its
/// largest-magnitude component is real and nonnegative (lowest index on
/// ties), and within a group of numerically equal eigenvalues the vectors are
/// ordered by the index of that component.
pub fn kl_decompose(matrix: &CyclicPsdMatrix) -> Result<KlDecomposition> {
    let sigma = matrix.sigma;
    let n = matrix.period();
    let a = &matrix.entries;
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(herm, EIG_TOLERANCE, EIG_MAX_ITERATIONS)
        .ok_or(Error::EigensolveFailure { sigma })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = eig.eigenvalues[order[0]].abs();

    let mut columns: Vec<(f64, usize, Vec<Complex64>)> = order
        .iter()
        .map(|&i| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            let lead = fix_phase(&mut v);
            (eig.eigenvalues[i], lead, v)
        })
        .collect();

    // Numerically degenerate eigenvalues: order by leading component index.
    let tie = 1e-12 * top.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (columns[start].0 - columns[end].0).abs() <= tie {
            end += 1;
        }
        columns[start..end].sort_by_key(|c| c.1);
        start = end;
    }

    let mut eigenvalues = Vec::with_capacity(n);
    for (value, _, _) in &columns {
        let v = *value;
        if v < 0.0 {
            if v < -PSD_TOLERANCE * top {
                return Err(Error::NotPositiveSemidefinite {
                    sigma,
                    min_eigenvalue: v,
                });
            }
            eigenvalues.push(0.0);
        } else {
            eigenvalues.push(v);
        }
    }
    let basis = DMatrix::from_fn(n, n, |r, c| columns[c].2[r]);
    Ok(KlDecomposition {
        sigma,
        eigenvalues,
        basis,
    })
}

/// Rotates `v` so its largest component is real and nonnegative; returns that index.
fn fix_phase(v: &mut [Complex64]) -> usize {
    let mut lead = 0;
    let mut best = v[0].norm();
    for (i, z) in v.iter().enumerate().skip(1) {
        let m = z.norm();
        if m > best * (1.0 + 1e-12) + 1e-15 {
            best = m;
            lead = i;
        }
    }
    if best > 0.0 {
        let rot = v[lead].conj() / best;
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[lead] = Complex64::new(v[lead].re, 0.0);
    }
    lead
}

/// Which representation a [`SpectrumDensity`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityBasis {
    Cl,
    Kl,
    Rearranged,
}

/// Density sampled on the full-band midpoint grid `(j + 1/2) / n`, `j < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDensity {
    pub values: Vec<f64>,
    pub basis: DensityBasis,
}

impl SpectrumDensity {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lambda(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.values.len() as f64
    }
}

/// Eigenvalues of the cyclic PSD matrix at every sub-band node; `rows[i][p]`
/// is rank `p` at `sigma_i`.
pub fn subband_eigenvalues<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    grid: &FrequencyGrid,
) -> Result<Vec<Vec<f64>>> {
    if grid.period() != model.period() {
        return Err(Error::InvalidParameter(format!(
            "grid period {} does not match model period {}",
            grid.period(),
            model.period()
        )));
    }
    (0..grid.points_per_subband())
        .into_par_iter()
        .map(|i| {
            let m = assemble_cyclic_psd_matrix(model, grid.sigma(i))?;
            Ok(kl_decompose(&m)?.eigenvalues)
        })
        .collect()
}

/// Lays out per-node eigenvalues as a full-band KL-PSD.
pub fn kl_field_from_eigenvalues(rows: &[Vec<f64>], grid: &FrequencyGrid) -> SpectrumDensity {
    let m = grid.points_per_subband();
    let mut values = vec![0.0; grid.full_band_len()];
    for (i, row) in rows.iter().enumerate() {
        for (p, &v) in row.iter().enumerate() {
            values[p * m + i] = v;
        }
    }
    SpectrumDensity {
        values,
        basis: DensityBasis::Kl,
    }
}

pub fn kl_psd_field<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    grid: &FrequencyGrid,
) -> Result<SpectrumDensity> {
    let rows = subband_eigenvalues(model, grid)?;
    Ok(kl_field_from_eigenvalues(&rows, grid))
}

/// Samples the PSD `cyclic_value(0, lambda)` on the full-band grid.
pub fn cl_psd_field<M: CyclicSpectrumModel + ?Sized>(model: &M, grid: &FrequencyGrid) -> SpectrumDensity {
    SpectrumDensity {
        values: grid
            .lambda_nodes()
            .map(|l| model.cyclic_value(0, l).re)
            .collect(),
        basis: DensityBasis::Cl,
    }
}

pub fn decreasing_rearrangement(density: &SpectrumDensity) -> SpectrumDensity {
    let mut values = density.values.clone();
    values.sort_by(|a, b| b.total_cmp(a));
    SpectrumDensity {
        values,
        basis: DensityBasis::Rearranged,
    }
}

pub fn total_power(density: &SpectrumDensity) -> f64 {
    density.values.iter().sum::<f64>() / density.len() as f64
}

/// Integral of the (piecewise-constant) density over `[0, rho)`.
pub fn partial_power(density: &SpectrumDensity, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in (0, 1), got {rho}"
        )));
    }
    let n = density.len();
    let h = 1.0 / n as f64;
    let cells = rho * n as f64;
    let full = (cells.floor() as usize).min(n);
    let mut acc: f64 = density.values[..full].iter().sum::<f64>() * h;
    if full < n {
        acc += density.values[full] * (cells - full as f64) * h;
    }
    Ok(acc)
}

/// Differential entropy (nats) of the density normalised to unit mass.
pub fn representation_entropy(density: &SpectrumDensity) -> Result<f64> {
    let total = total_power(density);
    if !(total > 0.0) {
        return Err(Error::ZeroPower);
    }
    let n = density.len() as f64;
    let acc: f64 = density
        .values
        .iter()
        .map(|&v| {
            let p = v / total;
            if p > 0.0 {
                p * p.ln()
            } else {
                0.0
            }
        })
        .sum();
    Ok(-acc / n)
}

/// `int ln|S(sigma)| d sigma` over one sub-band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDetIntegral {
    pub value: f64,
    /// Some eigenvalue fell below [`LOG_FLOOR`]; `value` is then `-inf`.
    pub singular: bool,
}

impl LogDetIntegral {
    pub fn exp(&self) -> f64 {
        if self.singular {
            0.0
        } else {
            self.value.exp()
        }
    }
}

pub(crate) fn log_det_from_rows(rows: &[Vec<f64>], grid: &FrequencyGrid) -> Result<LogDetIntegral> {
    grid.require_quadrature()?;
    let mut acc = 0.0;
    for row in rows {
        for &v in row {
            if v < LOG_FLOOR {
                return Ok(LogDetIntegral {
                    value: f64::NEG_INFINITY,
                    singular: true,
                });
            }
            acc += v.ln();
        }
    }
    Ok(LogDetIntegral {
        value: acc * grid.step(),
        singular: false,
    })
}

pub fn log_det_integral<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    grid: &FrequencyGrid,
) -> Result<LogDetIntegral> {
    let rows = subband_eigenvalues(model, grid)?;
    log_det_from_rows(&rows, grid)
}

/// KL spectral flatness: one-step prediction MMSE over total power.
pub fn spectral_flatness<M: CyclicSpectrumModel + ?Sized>(model: &M, grid: &FrequencyGrid) -> Result<f64> {
    let rows = subband_eigenvalues(model, grid)?;
    let power: f64 = rows.iter().flatten().sum::<f64>() * grid.step();
    if !(power > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(log_det_from_rows(&rows, grid)?.exp() / power)
}
