//! Browser bindings for the bound calculators.
//!
//! Each export returns a flat row-major table so the page can slice it
//! without any serialization layer. The plain functions in [`tables`] do the
//! work and are what the native tests exercise.

use wasm_bindgen::prelude::*;

pub mod tables {
    use cyclo_bounds::kl::{cl_psd_field, decreasing_rearrangement, kl_psd_field};
    use cyclo_bounds::mmse::SignalSpectrumTable;
    use cyclo_bounds::models::{composite_model, SrrcPam};
    use cyclo_bounds::spectral::FrequencyGrid;
    use cyclo_bounds::Result;

    /// Columns per row of [`spectra`].
    pub const SPECTRA_COLUMNS: usize = 5;
    /// Columns per row of [`mmse_curves`].
    pub const MMSE_COLUMNS: usize = 7;
    /// Columns per row of [`sync_gain_curve`].
    pub const GAIN_COLUMNS: usize = 4;

    /// Rows of `lambda, cl, kl, cl_sorted, kl_sorted` over the full band.
    pub fn spectra(period: usize, delta: f64, noise_power: f64, grid_points: usize) -> Result<Vec<f64>> {
        let grid = FrequencyGrid::new(period, grid_points)?;
        let model = composite_model(SrrcPam::new(period, delta)?, noise_power)?;
        let cl = cl_psd_field(&model, &grid);
        let kl = kl_psd_field(&model, &grid)?;
        let cl_sorted = decreasing_rearrangement(&cl);
        let kl_sorted = decreasing_rearrangement(&kl);
        let mut out = Vec::with_capacity(cl.len() * SPECTRA_COLUMNS);
        for j in 0..cl.len() {
            out.extend([
                grid.lambda(j),
                cl.values[j],
                kl.values[j],
                cl_sorted.values[j],
                kl_sorted.values[j],
            ]);
        }
        Ok(out)
    }

    /// Rows of `snr_db, nc, c, p, nc_wss, c_wss, p_wss`.
    pub fn mmse_curves(period: usize, delta: f64, snr_db: &[f64], grid_points: usize) -> Result<Vec<f64>> {
        let grid = FrequencyGrid::new(period, grid_points)?;
        let table = SignalSpectrumTable::new(&SrrcPam::new(period, delta)?, &grid)?;
        let mut out = Vec::with_capacity(snr_db.len() * MMSE_COLUMNS);
        for &db in snr_db {
            let r = table.report(10f64.powf(-db / 10.0));
            out.extend([db, r.mmse_nc, r.mmse_c, r.mmse_p, r.mmse_nc_wss, r.mmse_c_wss, r.mmse_p_wss]);
        }
        Ok(out)
    }

    /// Rows of `delta / delta_wss, 1/zeta_nc, 1/zeta_c, 1/zeta_p` over an even delay sweep.
    pub fn sync_gain_curve(period: usize, snr_db: f64, points: usize, grid_points: usize) -> Result<Vec<f64>> {
        let grid = FrequencyGrid::new(period, grid_points)?;
        let wss = SrrcPam::wss_delta(period);
        let steps = points.max(2) - 1;
        let mut out = Vec::with_capacity((steps + 1) * GAIN_COLUMNS);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let table = SignalSpectrumTable::new(&SrrcPam::new(period, t * wss)?, &grid)?;
            let z = table.sync_gains(10f64.powf(-snr_db / 10.0));
            out.extend([t, 1.0 / z.zeta_nc, 1.0 / z.zeta_c, 1.0 / z.zeta_p]);
        }
        Ok(out)
    }
}

fn to_js(e: cyclo_bounds::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn kl_spectra(period: usize, delta: f64, noise_power: f64, grid_points: usize) -> Result<Vec<f64>, JsError> {
    tables::spectra(period, delta, noise_power, grid_points).map_err(to_js)
}

#[wasm_bindgen]
pub fn mmse_curves(period: usize, delta: f64, snr_db: Vec<f64>, grid_points: usize) -> Result<Vec<f64>, JsError> {
    tables::mmse_curves(period, delta, &snr_db, grid_points).map_err(to_js)
}

#[wasm_bindgen]
pub fn sync_gain_curve(period: usize, snr_db: f64, points: usize, grid_points: usize) -> Result<Vec<f64>, JsError> {
    tables::sync_gain_curve(period, snr_db, points, grid_points).map_err(to_js)
}

/// Largest delay for which the model is still wide-sense stationary.
#[wasm_bindgen]
pub fn wss_delta(period: usize) -> f64 {
    cyclo_bounds::models::SrrcPam::wss_delta(period)
}
