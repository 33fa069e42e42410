//! Frequency grids, the cyclic spectrum model interface and cyclic PSD matrices.
//!
//! A cyclostationary process of period `P` is described by its cyclic spectrum
//! `S^(k/P)(f)`, the weight of the spectral-correlation ridge at cycle
//! frequency `k/P`. Sampling it `1/P` apart yields, for every sub-band
//! frequency `sigma` in `[0, 1/P)`, a `P x P` Hermitian matrix whose entry
//! `(r, c)` is `S^((r-c)/P)(sigma + r/P)`. Every bound in this crate is an
//! integral over `sigma` of some function of that matrix.
//!
//! All frequencies are dimensionless (cycles/sample) and the full band is `[0, 1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum number of midpoint nodes per sub-band accepted by the integrators.
pub const MIN_QUADRATURE_POINTS: usize = 16;

/// Default number of midpoint nodes per sub-band.
pub const DEFAULT_POINTS_PER_SUBBAND: usize = 1024;

/// Relative tolerance of the Hermitian check at assembly time.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Relative tolerance on negative eigenvalues before a matrix is rejected as indefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Midpoint grid over one sub-band `[0, 1/P)`.
///
/// Node `i` sits at `sigma_i = (i + 1/2) / (P M)`. The same nodes shifted by
/// `p/P` tile the full band, so node `p M + i` of the full-band grid is
/// `sigma_i + p/P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    period: usize,
    points_per_subband: usize,
}

impl FrequencyGrid {
    pub fn new(period: usize, points_per_subband: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter("period must be positive".into()));
        }
        if points_per_subband == 0 {
            return Err(Error::InvalidParameter(
                "points per sub-band must be positive".into(),
            ));
        }
        Ok(Self {
            period,
            points_per_subband,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn points_per_subband(&self) -> usize {
        self.points_per_subband
    }

    /// Total number of nodes over the full band, `P M`.
    pub fn full_band_len(&self) -> usize {
        self.period * self.points_per_subband
    }

    /// Node spacing `1 / (P M)`.
    pub fn step(&self) -> f64 {
        1.0 / self.full_band_len() as f64
    }

    pub fn sigma(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.step()
    }

    pub fn sigma_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points_per_subband).map(move |i| self.sigma(i))
    }

    /// Full-band node `j`, i.e. `lambda_j = (j + 1/2) / (P M)`.
    pub fn lambda(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step()
    }

    pub fn lambda_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.full_band_len()).map(move |j| self.lambda(j))
    }

    pub(crate) fn require_quadrature(&self) -> Result<()> {
        if self.points_per_subband < MIN_QUADRATURE_POINTS {
            return Err(Error::TooFewNodes {
                min: MIN_QUADRATURE_POINTS,
                got: self.points_per_subband,
            });
        }
        Ok(())
    }
}

/// Analytic description of a cyclostationary process.
///
/// Implementations must satisfy the conjugate-pair relation
/// `cyclic_value(-k, f) == conj(cyclic_value(k, f + k/P))` and return a real,
/// nonnegative value for `k = 0` (the PSD). The cycle index `k` is signed and
/// is never reduced modulo `P`.
pub trait CyclicSpectrumModel: Sync {
    fn period(&self) -> usize;

    /// Cyclic spectrum `S^(k/P)(f)`.
    fn cyclic_value(&self, k: i64, f: f64) -> Complex64;

    /// Declared average power of the process.
    fn power(&self) -> f64;
}

impl<M: CyclicSpectrumModel + ?Sized> CyclicSpectrumModel for &M {
    fn period(&self) -> usize {
        (**self).period()
    }

    fn cyclic_value(&self, k: i64, f: f64) -> Complex64 {
        (**self).cyclic_value(k, f)
    }

    fn power(&self) -> f64 {
        (**self).power()
    }
}

/// White WSS noise viewed as a cyclostationary process of arbitrary period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteNoise {
    pub period: usize,
    pub power: f64,
}

impl WhiteNoise {
    pub fn new(period: usize, power: f64) -> Result<Self> {
        if period == 0 || !(power >= 0.0) || !power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "white noise needs period >= 1 and finite power >= 0 (got P = {period}, power = {power})"
            )));
        }
        Ok(Self { period, power })
    }
}

impl CyclicSpectrumModel for WhiteNoise {
    fn period(&self) -> usize {
        self.period
    }

    fn cyclic_value(&self, k: i64, _f: f64) -> Complex64 {
        if k == 0 {
            Complex64::new(self.power, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn power(&self) -> f64 {
        self.power
    }
}

/// A model plus independent white noise of power `noise_power`.
#[derive(Debug, Clone, Copy)]
pub struct WithWhiteNoise<S> {
    pub signal: S,
    pub noise_power: f64,
}

impl<S: CyclicSpectrumModel> WithWhiteNoise<S> {
    pub fn new(signal: S, noise_power: f64) -> Result<Self> {
        if !(noise_power >= 0.0) || !noise_power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise power must be finite and >= 0, got {noise_power}"
            )));
        }
        Ok(Self {
            signal,
            noise_power,
        })
    }
}

impl<S: CyclicSpectrumModel> CyclicSpectrumModel for WithWhiteNoise<S> {
    fn period(&self) -> usize {
        self.signal.period()
    }

    fn cyclic_value(&self, k: i64, f: f64) -> Complex64 {
        let v = self.signal.cyclic_value(k, f);
        if k == 0 {
            v + self.noise_power
        } else {
            v
        }
    }

    fn power(&self) -> f64 {
        self.signal.power() + self.noise_power
    }
}

/// Cyclic PSD matrix at one sub-band frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPsdMatrix {
    pub sigma: f64,
    pub entries: DMatrix<Complex64>,
}

impl CyclicPsdMatrix {
    pub fn period(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A - A^H|` entry, relative to `max |A|` (0 for the zero matrix).
    pub fn hermitian_residual(&self) -> f64 {
        let a = &self.entries;
        let n = a.nrows();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
            }
        }
        let scale = self.max_abs();
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// Assembles `[S(sigma)]_{r,c} = cyclic_value(r - c, sigma + r/P)`.
pub fn assemble_cyclic_psd_matrix<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    sigma: f64,
) -> Result<CyclicPsdMatrix> {
    let p = model.period();
    if !(sigma >= 0.0 && sigma < 1.0 / p as f64) {
        return Err(Error::InvalidFrequency { sigma, period: p });
    }
    let entries = DMatrix::from_fn(p, p, |r, c| {
        let k = r as i64 - c as i64;
        model.cyclic_value(k, sigma + r as f64 / p as f64)
    });
    let m = CyclicPsdMatrix { sigma, entries };
    let residual = m.hermitian_residual();
    if !(residual <= HERMITIAN_TOLERANCE) {
        return Err(Error::ModelInconsistent { sigma, residual });
    }
    Ok(m)
}

/// Weight of the spectral correlation on the ridge `alpha = k/P`; zero off the ridges.
pub fn spectral_correlation<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    alpha: f64,
    f: f64,
) -> Complex64 {
    let scaled = alpha * model.period() as f64;
    let k = scaled.round();
    if (scaled - k).abs() > 1e-9 {
        return Complex64::new(0.0, 0.0);
    }
    model.cyclic_value(k as i64, f)
}

/// Midpoint rule over one sub-band: `sum_i integrand(sigma_i) / (P M)`.
pub fn integrate_subband<F>(integrand: F, grid: &FrequencyGrid) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    grid.require_quadrature()?;
    let mut acc = 0.0;
    for sigma in grid.sigma_nodes() {
        let v = integrand(sigma);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { sigma });
        }
        acc += v;
    }
    Ok(acc * grid.step())
}

/// Residuals reported by [`validate_psd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdDiagnostics {
    /// Largest `|A - A^H|` relative to `max |A|`.
    pub hermitian_residual: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl PsdDiagnostics {
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual <= HERMITIAN_TOLERANCE
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOLERANCE * self.max_eigenvalue.abs()
    }

    pub fn is_valid(&self) -> bool {
        self.is_hermitian() && self.is_psd()
    }
}

/// Reports how far a matrix is from being Hermitian and positive semidefinite.
///
/// Eigenvalues are taken from the Hermitian part, so a corrupted entry shows up
/// in the residual rather than as a solver failure.
pub fn validate_psd(matrix: &CyclicPsdMatrix) -> PsdDiagnostics {
    let hermitian_residual = matrix.hermitian_residual();
    let a = &matrix.entries;
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(herm).eigenvalues;
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    PsdDiagnostics {
        hermitian_residual,
        min_eigenvalue,
        max_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes_are_interior_and_uniform() {
        let g = FrequencyGrid::new(4, 32).unwrap();
        let nodes: Vec<f64> = g.sigma_nodes().collect();
        assert_eq!(nodes.len(), 32);
        for w in nodes.windows(2) {
            assert!((w[1] - w[0] - 1.0 / 128.0).abs() < 1e-15);
        }
        assert!(nodes[0] > 0.0 && *nodes.last().unwrap() < 0.25);
        assert_eq!(g.lambda(3 * 32 + 5), g.sigma(5) + 0.75);
    }

    #[test]
    fn white_noise_matrix_is_scaled_identity() {
        let m = assemble_cyclic_psd_matrix(&WhiteNoise::new(3, 2.5).unwrap(), 0.1).unwrap();
        assert_eq!(m.entries, DMatrix::identity(3, 3) * Complex64::new(2.5, 0.0));
        let d = validate_psd(&m);
        assert_eq!(d.hermitian_residual, 0.0);
        assert!((d.min_eigenvalue - 2.5).abs() < 1e-14);
    }

    #[test]
    fn sigma_outside_subband_is_rejected() {
        let w = WhiteNoise::new(4, 1.0).unwrap();
        assert!(matches!(
            assemble_cyclic_psd_matrix(&w, 0.25),
            Err(Error::InvalidFrequency { .. })
        ));
        assert!(assemble_cyclic_psd_matrix(&w, -1e-3).is_err());
    }

    struct Skewed;
    impl CyclicSpectrumModel for Skewed {
        fn period(&self) -> usize {
            2
        }
        fn cyclic_value(&self, k: i64, _f: f64) -> Complex64 {
            match k {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.5, 0.0),
                _ => Complex64::new(0.0, 0.0),
            }
        }
        fn power(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn non_hermitian_model_is_reported() {
        assert!(matches!(
            assemble_cyclic_psd_matrix(&Skewed, 0.1),
            Err(Error::ModelInconsistent { .. })
        ));
    }

    #[test]
    fn corrupted_entry_is_flagged() {
        let mut m = assemble_cyclic_psd_matrix(&WhiteNoise::new(4, 1.0).unwrap(), 0.1).unwrap();
        m.entries[(0, 2)] = Complex64::new(0.3, 0.1);
        let d = validate_psd(&m);
        assert!(d.hermitian_residual > HERMITIAN_TOLERANCE);
        assert!(!d.is_valid());
    }

    #[test]
    fn spectral_correlation_is_zero_off_ridge() {
        let w = WhiteNoise::new(4, 1.5).unwrap();
        assert_eq!(spectral_correlation(&w, 0.0, 0.3).re, 1.5);
        assert_eq!(spectral_correlation(&w, 1.0 / 3.0, 0.3), Complex64::new(0.0, 0.0));
        assert_eq!(spectral_correlation(&w, 0.25, 0.3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quadrature_of_constants_and_errors() {
        let g = FrequencyGrid::new(4, 64).unwrap();
        assert!((integrate_subband(|_| 1.0, &g).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            integrate_subband(|s| if s > 0.1 { f64::NAN } else { 1.0 }, &g),
            Err(Error::NonFiniteIntegrand { .. })
        ));
        let coarse = FrequencyGrid::new(4, 8).unwrap();
        assert!(matches!(
            integrate_subband(|_| 1.0, &coarse),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn midpoint_error_is_second_order() {
        // int_0^{1/4} s^3 ds = 1/1024
        let exact = 1.0 / 1024.0;
        let err = |m| {
            let g = FrequencyGrid::new(4, m).unwrap();
            (integrate_subband(|s| s.powi(3), &g).unwrap() - exact).abs()
        };
        for m in [16, 32, 64, 128] {
            assert!(err(m) / err(2 * m) >= 3.9, "m = {m}");
        }
    }
}
