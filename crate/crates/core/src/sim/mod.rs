//! Time-domain validation of the spectral bounds.

mod estimator;
mod filter;
mod predictor;
mod realization;

pub use estimator::{
    estimate_cyclic_spectrum, CyclicPeriodogram, CyclicSpectrumEstimate, DEFAULT_SEGMENT_LENGTH,
    MIN_SEGMENTS,
};
pub use filter::{
    apply_fresh, apply_kl_wiener, design_cwf, empirical_mse, max_relative_difference, FreshFilterBank,
};
pub use predictor::{
    autocorrelation_kernel, finite_prediction_mmse, finite_prediction_mmse_sequence,
    phase_geometric_mean_sequence, FinitePredictor, PamKernel, MAX_ORDER, PULSE_PERIODS,
};
pub use realization::{
    generate_realization, read_dump, sidecar_path, trial_seed, write_dump, Realization, Series,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::kl::kl_decompose;
use crate::spectral::{assemble_cyclic_psd_matrix, CyclicPsdMatrix, CyclicSpectrumModel, FrequencyGrid};

/// Largest change of the KL eigenvalues when the cyclic PSD matrix is
/// conjugated by `diag(exp(j 2 pi n0 q / P))`, over all sub-band nodes.
pub fn timeshift_spectrum_check<M: CyclicSpectrumModel + ?Sized>(
    model: &M,
    shift: i64,
    grid: &FrequencyGrid,
) -> Result<f64> {
    let period = model.period();
    let phases: Vec<Complex64> = (0..period)
        .map(|q| {
            let t = (shift * q as i64).rem_euclid(period as i64) as f64 / period as f64;
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
        })
        .collect();
    let deviations: Vec<f64> = (0..grid.points_per_subband())
        .into_par_iter()
        .map(|i| {
            let m = assemble_cyclic_psd_matrix(model, grid.sigma(i))?;
            let shifted = CyclicPsdMatrix {
                sigma: m.sigma,
                entries: DMatrix::from_fn(period, period, |r, c| {
                    phases[r] * m.entries[(r, c)] * phases[c].conj()
                }),
            };
            let a = kl_decompose(&m)?.eigenvalues;
            let b = kl_decompose(&shifted)?.eigenvalues;
            Ok(a.iter()
                .zip(&b)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0f64, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{composite_model, SrrcPam};

    #[test]
    fn shift_invariance() {
        let g = FrequencyGrid::new(4, 32).unwrap();
        let x = composite_model(SrrcPam::new(4, 0.0).unwrap(), 1.0).unwrap();
        assert_eq!(timeshift_spectrum_check(&x, 0, &g).unwrap(), 0.0);
        assert_eq!(timeshift_spectrum_check(&x, 4, &g).unwrap(), 0.0);
        assert!(timeshift_spectrum_check(&x, 1, &g).unwrap() < 1e-10);
    }
}
