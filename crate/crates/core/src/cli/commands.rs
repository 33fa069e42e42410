use rayon::prelude::*;

use super::csv::{CsvTable, Field};
use super::values::{linspace, parse_values};
use super::{CliError, Command, CommonArgs, PredictArgs, SimulateArgs};
use crate::kl::{cl_psd_field, decreasing_rearrangement, kl_psd_field, representation_entropy};
use crate::mmse::{high_snr_asymptote, AdditiveScenario, Mode, SignalSpectrumTable};
use crate::models::{composite_model, SrrcPam};
use crate::sim::{
    apply_fresh, design_cwf, empirical_mse, generate_realization, phase_geometric_mean_sequence,
    trial_seed, write_dump, PamKernel, Series, PULSE_PERIODS,
};
use crate::spectral::FrequencyGrid;

/// Points in the default delay sweep.
const SWEEP_POINTS: usize = 64;

type CliResult<T> = Result<T, CliError>;

enum DeltaDefault {
    Zero,
    Sweep,
}

enum NoiseDefault {
    Power(f64),
    Snr(&'static str),
    SnrDb(&'static str),
}

struct Setup {
    period: usize,
    deltas: Vec<f64>,
    noise_powers: Vec<f64>,
    grid: FrequencyGrid,
    header: String,
}

fn list_text(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| {
            if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
                format!("{v}")
            } else {
                format!("{v:e}")
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn resolve(
    name: &str,
    args: &CommonArgs,
    delta_default: DeltaDefault,
    noise_default: NoiseDefault,
) -> CliResult<Setup> {
    let period = args.period;
    if period < 2 {
        return Err(CliError::Config(format!("period must be at least 2, got {period}")));
    }
    let wss = SrrcPam::wss_delta(period);
    let deltas = match (&args.delta, delta_default) {
        (Some(s), _) => parse_values(s).map_err(CliError::Config)?,
        (None, DeltaDefault::Zero) => vec![0.0],
        (None, DeltaDefault::Sweep) => linspace(0.0, wss, SWEEP_POINTS),
    };
    for &d in &deltas {
        SrrcPam::new(period, d)?;
    }
    let from_snr = |v: Vec<f64>| -> CliResult<Vec<f64>> {
        v.into_iter()
            .map(|s| {
                if s > 0.0 {
                    Ok(1.0 / s)
                } else {
                    Err(CliError::Config(format!("SNR must be > 0, got {s}")))
                }
            })
            .collect()
    };
    let from_db = |v: Vec<f64>| v.into_iter().map(|db| 10f64.powf(-db / 10.0)).collect();
    let noise_powers: Vec<f64> = if let Some(s) = &args.noise_power {
        parse_values(s).map_err(CliError::Config)?
    } else if let Some(s) = &args.snr {
        from_snr(parse_values(s).map_err(CliError::Config)?)?
    } else if let Some(s) = &args.snr_db {
        from_db(parse_values(s).map_err(CliError::Config)?)
    } else {
        match noise_default {
            NoiseDefault::Power(p) => vec![p],
            NoiseDefault::Snr(s) => from_snr(parse_values(s).map_err(CliError::Config)?)?,
            NoiseDefault::SnrDb(s) => from_db(parse_values(s).map_err(CliError::Config)?),
        }
    };
    if let Some(bad) = noise_powers.iter().find(|p| !(**p > 0.0) || !p.is_finite() || !(1.0 / **p).is_finite()) {
        return Err(CliError::Config(format!(
            "noise power must be finite, > 0 and give a finite SNR, got {bad:e}"
        )));
    }
    let grid = FrequencyGrid::new(period, args.grid_points)?;
    let header = format!(
        "command={name} period={period} delta={} noise_power={} grid_points={} seed={}",
        list_text(&deltas),
        list_text(&noise_powers),
        args.grid_points,
        args.seed
    );
    Ok(Setup {
        period,
        deltas,
        noise_powers,
        grid,
        header,
    })
}

fn single_noise(setup: &Setup) -> CliResult<f64> {
    match setup.noise_powers.as_slice() {
        [p] => Ok(*p),
        _ => Err(CliError::Config(
            "this command takes a single noise level".into(),
        )),
    }
}

fn single_delta(setup: &Setup) -> CliResult<f64> {
    match setup.deltas.as_slice() {
        [d] => Ok(*d),
        _ => Err(CliError::Config("this command takes a single delta".into())),
    }
}

/// Runs a command and returns the CSV text.
pub fn run_command(command: &Command) -> CliResult<String> {
    match command {
        Command::Spectra(a) => spectra(a),
        Command::Entropy(a) => entropy(a),
        Command::Mmse(a) => mmse(a),
        Command::Highsnr(a) => highsnr(a),
        Command::Syncgain(a) => syncgain(a),
        Command::Simulate(a) => simulate(a),
        Command::Predict(a) => predict(a),
    }
}

fn spectra(args: &CommonArgs) -> CliResult<String> {
    let setup = resolve("spectra", args, DeltaDefault::Zero, NoiseDefault::Power(1.0))?;
    let pz = single_noise(&setup)?;
    let mut table = CsvTable::new(
        &setup.header,
        &["delta", "lambda", "cl_psd", "kl_psd", "cl_psd_sorted", "kl_psd_sorted"],
    );
    for &delta in &setup.deltas {
        let x = composite_model(SrrcPam::new(setup.period, delta)?, pz)?;
        let cl = cl_psd_field(&x, &setup.grid);
        let kl = kl_psd_field(&x, &setup.grid)?;
        let cl_sorted = decreasing_rearrangement(&cl);
        let kl_sorted = decreasing_rearrangement(&kl);
        for j in 0..cl.len() {
            table.nums(&[
                delta,
                setup.grid.lambda(j),
                cl.values[j],
                kl.values[j],
                cl_sorted.values[j],
                kl_sorted.values[j],
            ]);
        }
    }
    Ok(table.into_string())
}

fn entropy(args: &CommonArgs) -> CliResult<String> {
    let setup = resolve("entropy", args, DeltaDefault::Sweep, NoiseDefault::Power(1.0))?;
    let pz = single_noise(&setup)?;
    let rows: Vec<[f64; 3]> = setup
        .deltas
        .par_iter()
        .map(|&delta| -> CliResult<[f64; 3]> {
            let x = composite_model(SrrcPam::new(setup.period, delta)?, pz)?;
            let h_kl = representation_entropy(&kl_psd_field(&x, &setup.grid)?)?;
            let h_cl = representation_entropy(&cl_psd_field(&x, &setup.grid))?;
            Ok([delta, h_kl, h_cl])
        })
        .collect::<CliResult<_>>()?;
    let mut table = CsvTable::new(&setup.header, &["delta", "h_kl", "h_cl"]);
    for r in rows {
        table.nums(&r);
    }
    Ok(table.into_string())
}

fn mmse(args: &CommonArgs) -> CliResult<String> {
    let setup = resolve("mmse", args, DeltaDefault::Zero, NoiseDefault::Snr("0.05:0.05:2"))?;
    let delta = single_delta(&setup)?;
    let spectrum = SignalSpectrumTable::new(&SrrcPam::new(setup.period, delta)?, &setup.grid)?;
    let mut table = CsvTable::new(
        &setup.header,
        &["snr", "mmse_nc", "mmse_c", "mmse_p", "mmse_nc_wss", "mmse_c_wss", "mmse_p_wss"],
    );
    for &pz in &setup.noise_powers {
        let r = spectrum.report(pz);
        table.nums(&[
            r.snr,
            r.mmse_nc,
            r.mmse_c,
            r.mmse_p,
            r.mmse_nc_wss,
            r.mmse_c_wss,
            r.mmse_p_wss,
        ]);
    }
    Ok(table.into_string())
}

fn highsnr(args: &CommonArgs) -> CliResult<String> {
    let setup = resolve("highsnr", args, DeltaDefault::Zero, NoiseDefault::SnrDb("0:1:50"))?;
    let delta = single_delta(&setup)?;
    let spectrum = SignalSpectrumTable::new(&SrrcPam::new(setup.period, delta)?, &setup.grid)?;
    let band = spectrum.occupied_band();
    let mut table = CsvTable::new(
        &format!("{} occupied_band={band}", setup.header),
        &["snr_db", "mode", "mmse_times_snr", "asymptote"],
    );
    for &pz in &setup.noise_powers {
        let snr = 1.0 / pz;
        let snr_db = 10.0 * snr.log10();
        for mode in Mode::ALL {
            let value = match mode {
                Mode::NonCausal => spectrum.mmse_noncausal(pz),
                Mode::Causal => spectrum.mmse_causal(snr),
                Mode::Prediction => spectrum.mmse_prediction(pz).value,
            };
            let asymptote = high_snr_asymptote(mode, band, snr)?;
            table.row(&[
                Field::Num(snr_db),
                Field::Text(mode.name()),
                Field::Num(value * snr),
                Field::Num(asymptote * snr),
            ]);
        }
    }
    Ok(table.into_string())
}

fn syncgain(args: &CommonArgs) -> CliResult<String> {
    let setup = resolve("syncgain", args, DeltaDefault::Sweep, NoiseDefault::SnrDb("30"))?;
    let pz = single_noise(&setup)?;
    let wss = SrrcPam::wss_delta(setup.period);
    let rows: Vec<[f64; 4]> = setup
        .deltas
        .par_iter()
        .map(|&delta| -> CliResult<[f64; 4]> {
            let spectrum = SignalSpectrumTable::new(&SrrcPam::new(setup.period, delta)?, &setup.grid)?;
            let z = spectrum.sync_gains(pz);
            Ok([delta / wss, 1.0 / z.zeta_nc, 1.0 / z.zeta_c, 1.0 / z.zeta_p])
        })
        .collect::<CliResult<_>>()?;
    let mut table = CsvTable::new(
        &setup.header,
        &["delta_normalized", "inv_zeta_nc", "inv_zeta_c", "inv_zeta_p"],
    );
    for r in rows {
        table.nums(&r);
    }
    Ok(table.into_string())
}

fn simulate(args: &SimulateArgs) -> CliResult<String> {
    let setup = resolve("simulate", &args.common, DeltaDefault::Zero, NoiseDefault::Snr("1"))?;
    let delta = single_delta(&setup)?;
    if args.trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let n = args.samples;
    if n == 0 || n % setup.period != 0 {
        return Err(CliError::Config(format!(
            "samples must be a positive multiple of the period, got {n}"
        )));
    }
    let edge = PULSE_PERIODS * setup.period;
    if 2 * edge >= n {
        return Err(CliError::Config(format!("samples must exceed {}", 2 * edge)));
    }
    let model = SrrcPam::new(setup.period, delta)?;
    let spectrum = SignalSpectrumTable::new(&model, &setup.grid)?;
    let header = format!(
        "{} samples={n} trials={} edge_discard={edge}",
        setup.header, args.trials
    );
    let mut table = CsvTable::new(&header, &["snr", "empirical_mse", "analytic_mmse", "rel_error"]);
    for (level, &pz) in setup.noise_powers.iter().enumerate() {
        let scenario = AdditiveScenario::new(model, pz)?;
        let bank = design_cwf(&scenario, n)?;
        let mses: Vec<f64> = (0..args.trials)
            .into_par_iter()
            .map(|t| -> CliResult<f64> {
                let r = generate_realization(&model, pz, n, trial_seed(args.common.seed, t as u64))?;
                if level == 0 && t == 0 {
                    if let Some(path) = &args.dump {
                        write_dump(&r, Series::Observation, path)?;
                    }
                }
                let estimate = apply_fresh(&bank, &r.x)?;
                Ok(empirical_mse(&r.d, &estimate, edge)?)
            })
            .collect::<CliResult<_>>()?;
        let empirical = mses.iter().sum::<f64>() / mses.len() as f64;
        let analytic = spectrum.mmse_noncausal(pz);
        table.nums(&[
            1.0 / pz,
            empirical,
            analytic,
            (empirical - analytic).abs() / analytic,
        ]);
    }
    Ok(table.into_string())
}

fn predict(args: &PredictArgs) -> CliResult<String> {
    let setup = resolve("predict", &args.common, DeltaDefault::Zero, NoiseDefault::Power(1.0))?;
    let pz = single_noise(&setup)?;
    let delta = single_delta(&setup)?;
    if args.max_order == 0 {
        return Err(CliError::Config("max-order must be at least 1".into()));
    }
    let model = SrrcPam::new(setup.period, delta)?;
    let kernel = PamKernel::new(&model, pz)?;
    let finite = phase_geometric_mean_sequence(&kernel, args.max_order)?;
    let spectrum = SignalSpectrumTable::new(&model, &setup.grid)?;
    let bound = spectrum.mmse_prediction(pz).value;
    let mut table = CsvTable::new(
        &format!("{} max_order={}", setup.header, args.max_order),
        &["N", "finite_mmse", "bound"],
    );
    for (order, v) in finite.iter().enumerate().skip(1) {
        table.row(&[Field::Int(order as i64), Field::Num(*v), Field::Num(bound)]);
    }
    Ok(table.into_string())
}
