use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::models::{pulse_frequency_response, SrrcPam};
use crate::spectral::CyclicSpectrumModel;

/// One sample path of `x(n) = d(n - eps) + z(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub period: usize,
    pub delta: f64,
    pub noise_power: f64,
    pub seed: u64,
    /// The delay drawn for this path.
    pub epsilon: f64,
    pub d: Vec<Complex64>,
    pub z: Vec<Complex64>,
    pub x: Vec<Complex64>,
}

impl Realization {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Seed of trial `index` under master seed `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Draws a realization of length `n_samples`.
///
/// Symbols are circular complex Gaussian with variance `P`. The pulse and the
/// delay are applied in the DFT domain, `D[m] = U[m] B(m/N) exp(-j 2 pi m eps / N)`,
/// which is the circular convolution with the periodised pulse. Draw order
/// is symbols, delay, noise.
pub fn generate_realization(
    model: &SrrcPam,
    noise_power: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Realization> {
    let period = model.period();
    if n_samples == 0 || n_samples % period != 0 {
        return Err(Error::InvalidParameter(format!(
            "sample count must be a positive multiple of P = {period}, got {n_samples}"
        )));
    }
    if !(noise_power >= 0.0) || !noise_power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise power must be finite and >= 0, got {noise_power}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![Complex64::new(0.0, 0.0); n_samples];
    for k in 0..n_samples / period {
        d[k * period] = complex_gaussian(&mut rng, period as f64);
    }
    let epsilon = model.delta() * rng.random::<f64>();
    let z: Vec<Complex64> = (0..n_samples)
        .map(|_| complex_gaussian(&mut rng, noise_power))
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n_samples).process(&mut d);
    let n = n_samples as f64;
    for (m, v) in d.iter_mut().enumerate() {
        let f = m as f64 / n;
        let ramp = Complex64::from_polar(1.0 / n, -2.0 * std::f64::consts::PI * f * epsilon);
        *v *= pulse_frequency_response(period, f) * ramp;
    }
    planner.plan_fft_inverse(n_samples).process(&mut d);

    let x = d.iter().zip(&z).map(|(a, b)| a + b).collect();
    Ok(Realization {
        period,
        delta: model.delta(),
        noise_power,
        seed,
        epsilon,
        d,
        z,
        x,
    })
}

/// Which sequence of a realization to dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Signal,
    Noise,
    Observation,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Signal => "d",
            Series::Noise => "z",
            Series::Observation => "x",
        }
    }
}

/// Path of the text header written next to a dump.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".txt");
    PathBuf::from(name)
}

/// Writes a sequence as little-endian interleaved `f64` (I, Q) pairs plus a
/// one-line text header in `<path>.txt`.
pub fn write_dump(realization: &Realization, series: Series, path: &Path) -> Result<()> {
    let data = match series {
        Series::Signal => &realization.d,
        Series::Noise => &realization.z,
        Series::Observation => &realization.x,
    };
    let mut out = BufWriter::new(File::create(path)?);
    for v in data {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    let mut side = BufWriter::new(File::create(sidecar_path(path))?);
    writeln!(
        side,
        "period={} delta={:.16e} noise_power={:.16e} seed={} n_samples={} series={}",
        realization.period,
        realization.delta,
        realization.noise_power,
        realization.seed,
        data.len(),
        series.name()
    )?;
    side.flush()?;
    Ok(())
}

/// Reads back a dump written by [`write_dump`].
pub fn read_dump(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 16 != 0 {
        return Err(Error::InvalidParameter(format!(
            "dump length {} is not a multiple of 16 bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn same_seed_same_path() {
        let m = SrrcPam::new(4, 1.0).unwrap();
        let a = generate_realization(&m, 0.5, 4096, 11).unwrap();
        let b = generate_realization(&m, 0.5, 4096, 11).unwrap();
        assert_eq!(a, b);
        let c = generate_realization(&m, 0.5, 4096, 12).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn observation_is_sum() {
        let m = SrrcPam::new(4, 0.0).unwrap();
        let r = generate_realization(&m, 1.0, 1024, 3).unwrap();
        for i in 0..r.len() {
            assert_eq!(r.x[i], r.d[i] + r.z[i]);
        }
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn powers_match_model() {
        let m = SrrcPam::new(4, 0.0).unwrap();
        let r = generate_realization(&m, 1.0, 1 << 18, 5).unwrap();
        assert!((power(&r.d) - 1.0).abs() < 0.02);
        assert!((power(&r.x) - 2.0).abs() < 0.04);
    }

    #[test]
    fn delay_within_range() {
        let m = SrrcPam::new(4, 4.0 / 3.0).unwrap();
        for seed in 0..20 {
            let r = generate_realization(&m, 1.0, 64, seed).unwrap();
            assert!(r.epsilon >= 0.0 && r.epsilon < 4.0 / 3.0);
        }
    }

    #[test]
    fn length_must_be_multiple_of_period() {
        let m = SrrcPam::new(4, 0.0).unwrap();
        assert!(generate_realization(&m, 1.0, 1022, 1).is_err());
        assert!(generate_realization(&m, -1.0, 1024, 1).is_err());
    }

    #[test]
    fn trial_seeds_differ() {
        let s: Vec<u64> = (0..8).map(|i| trial_seed(1, i)).collect();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(trial_seed(9, 3), trial_seed(9, 3));
    }

    #[test]
    fn dump_round_trip() {
        let m = SrrcPam::new(2, 0.5).unwrap();
        let r = generate_realization(&m, 0.1, 128, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bin");
        write_dump(&r, Series::Observation, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 128 * 16);
        assert_eq!(read_dump(&path).unwrap(), r.x);
        let header = std::fs::read_to_string(sidecar_path(&path)).unwrap();
        assert!(header.starts_with("period=2 "));
        assert!(header.contains("seed=4 n_samples=128"));
    }
}
