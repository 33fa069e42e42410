use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use cyclo_bounds::kl::{
    cl_psd_field, decreasing_rearrangement, kl_decompose, kl_psd_field, representation_entropy,
    subband_eigenvalues, total_power,
};
use cyclo_bounds::mmse::{
    error_cyclic_psd, mmse_noncausal_via_coherence, AdditiveScenario, SignalSpectrumTable,
};
use cyclo_bounds::models::{composite_model, pam_cyclic_value, SrrcPam};
use cyclo_bounds::sim::{
    apply_fresh, design_cwf, generate_realization, timeshift_spectrum_check,
};
use cyclo_bounds::spectral::{assemble_cyclic_psd_matrix, validate_psd, FrequencyGrid};

fn period_and_delta() -> impl Strategy<Value = (usize, f64)> {
    (2usize..=8).prop_flat_map(|p| (Just(p), 0.0..=SrrcPam::wss_delta(p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assembled_matrix_is_hermitian_psd((p, delta) in period_and_delta(), frac in 0.0f64..1.0, pz in 0.0f64..3.0) {
        let x = composite_model(SrrcPam::new(p, delta).unwrap(), pz).unwrap();
        let sigma = frac / p as f64;
        let m = assemble_cyclic_psd_matrix(&x, sigma).unwrap();
        let d = validate_psd(&m);
        prop_assert!(d.hermitian_residual < 1e-12);
        prop_assert!(d.is_psd());
        for r in 0..p {
            let psd = x.signal.cyclic_value_at_zero(sigma + r as f64 / p as f64) + pz;
            prop_assert_eq!(m.entries[(r, r)].re, psd);
        }
    }

    #[test]
    fn conjugate_pair_relation((p, delta) in period_and_delta(), k in -7i64..=7, f in 0.0f64..1.0) {
        let a = pam_cyclic_value(p, delta, -k, f);
        let b = pam_cyclic_value(p, delta, k, f + k as f64 / p as f64).conj();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn unit_signal_power((p, delta) in period_and_delta()) {
        let g = FrequencyGrid::new(p, 64).unwrap();
        let t = SignalSpectrumTable::new(&SrrcPam::new(p, delta).unwrap(), &g).unwrap();
        prop_assert!((t.signal_power() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kl_entropy_never_exceeds_cl((p, delta) in period_and_delta()) {
        let g = FrequencyGrid::new(p, 64).unwrap();
        let x = composite_model(SrrcPam::new(p, delta).unwrap(), 1.0).unwrap();
        let kl = representation_entropy(&kl_psd_field(&x, &g).unwrap()).unwrap();
        let cl = representation_entropy(&cl_psd_field(&x, &g)).unwrap();
        prop_assert!(kl <= cl + 1e-9);
    }

    #[test]
    fn rearrangement_keeps_power((p, delta) in period_and_delta()) {
        let g = FrequencyGrid::new(p, 32).unwrap();
        let x = composite_model(SrrcPam::new(p, delta).unwrap(), 0.3).unwrap();
        let kl = kl_psd_field(&x, &g).unwrap();
        let sorted = decreasing_rearrangement(&kl);
        prop_assert!((total_power(&kl) - total_power(&sorted)).abs() < 1e-12);
        prop_assert!((total_power(&kl) - 1.3).abs() < 1e-6);
    }

    #[test]
    fn gains_never_exceed_one((p, delta) in period_and_delta(), snr_index in 0usize..3) {
        let snr = [1.0, 10.0, 1000.0][snr_index];
        let g = FrequencyGrid::new(p, 64).unwrap();
        let t = SignalSpectrumTable::new(&SrrcPam::new(p, delta).unwrap(), &g).unwrap();
        let z = t.sync_gains(1.0 / snr);
        prop_assert!(z.zeta_nc <= 1.0 + 1e-9);
        prop_assert!(z.zeta_c <= 1.0 + 1e-9);
        prop_assert!(z.zeta_p <= 1.0 + 1e-9);
    }

    #[test]
    fn mmse_orderings((p, delta) in period_and_delta(), snr in 0.05f64..50.0) {
        let g = FrequencyGrid::new(p, 64).unwrap();
        let t = SignalSpectrumTable::new(&SrrcPam::new(p, delta).unwrap(), &g).unwrap();
        let pz = 1.0 / snr;
        prop_assert!(t.mmse_noncausal(pz) <= t.mmse_causal(snr) + 1e-12);
        prop_assert!(t.mmse_noncausal(pz) <= t.mmse_noncausal_wss(pz) + 1e-12);
        prop_assert!(t.mmse_noncausal(pz / 1.5) <= t.mmse_noncausal(pz) + 1e-15);
        prop_assert!(t.mmse_causal(snr * 1.5) * snr * 1.5 >= t.mmse_causal(snr) * snr - 1e-12);
        let r = t.report(pz);
        for v in [r.mmse_nc, r.mmse_c, r.mmse_p, r.mmse_nc_wss, r.mmse_c_wss, r.mmse_p_wss] {
            prop_assert!(v >= 0.0 && v <= 1.0 + pz + 1e-9);
        }
    }

    #[test]
    fn snr_average_matches_log_det((p, delta) in period_and_delta(), snr in 0.1f64..3.0) {
        let g = FrequencyGrid::new(p, 64).unwrap();
        let t = SignalSpectrumTable::new(&SrrcPam::new(p, delta).unwrap(), &g).unwrap();
        let a = t.mmse_causal(snr);
        let b = t.mmse_causal_by_snr_average(snr, 512);
        prop_assert!(((a - b) / a).abs() < 1e-4);
    }

    #[test]
    fn prediction_causal_identity((p, delta) in period_and_delta(), snr in 0.1f64..100.0) {
        let g = FrequencyGrid::new(p, 64).unwrap();
        let t = SignalSpectrumTable::new(&SrrcPam::new(p, delta).unwrap(), &g).unwrap();
        let lhs = t.mmse_prediction(1.0 / snr).value;
        let rhs = (t.mmse_causal(snr) * snr).exp() / snr;
        prop_assert!(((lhs - rhs) / lhs).abs() < 1e-10);
    }

    #[test]
    fn error_spectrum_trace_identity((p, delta) in period_and_delta(), pz in 0.05f64..5.0) {
        let g = FrequencyGrid::new(p, 32).unwrap();
        let signal = SrrcPam::new(p, delta).unwrap();
        let s = AdditiveScenario::new(signal, pz).unwrap();
        let trace: f64 = g.sigma_nodes().map(|x| error_cyclic_psd(&s, x).unwrap().trace()).sum::<f64>() * g.step();
        let t = SignalSpectrumTable::new(&signal, &g).unwrap();
        prop_assert!((trace - t.mmse_noncausal(pz)).abs() < 1e-9);
        let via = mmse_noncausal_via_coherence(&s, &g).unwrap();
        prop_assert!((via - t.mmse_noncausal(pz)).abs() < 1e-9);
    }

    #[test]
    fn shift_leaves_kl_spectrum((p, delta) in period_and_delta(), n0 in -20i64..20) {
        let g = FrequencyGrid::new(p, 16).unwrap();
        let x = composite_model(SrrcPam::new(p, delta).unwrap(), 1.0).unwrap();
        prop_assert!(timeshift_spectrum_check(&x, n0, &g).unwrap() < 1e-10);
    }

    #[test]
    fn decomposition_is_unitary_and_reconstructs((p, delta) in period_and_delta(), frac in 0.0f64..1.0) {
        let x = composite_model(SrrcPam::new(p, delta).unwrap(), 0.2).unwrap();
        let m = assemble_cyclic_psd_matrix(&x, frac / p as f64).unwrap();
        let d = kl_decompose(&m).unwrap();
        let id = DMatrix::<Complex64>::identity(p, p);
        prop_assert!((d.basis.adjoint() * &d.basis - id).camax() < 1e-10);
        prop_assert!((d.reconstruct() - &m.entries).camax() < 1e-9 * m.max_abs());
        // ties within 1e-12 of the top value are ordered by basis index instead
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-12 * d.eigenvalues[0]));
        prop_assert!(d.eigenvalues[p - 1] >= -1e-10 * d.eigenvalues[0]);
    }
}

trait PsdAtZero {
    fn cyclic_value_at_zero(&self, f: f64) -> f64;
}

impl PsdAtZero for SrrcPam {
    fn cyclic_value_at_zero(&self, f: f64) -> f64 {
        use cyclo_bounds::spectral::CyclicSpectrumModel;
        self.cyclic_value(0, f).re
    }
}

#[test]
fn eigenvalue_curves_move_no_more_than_the_matrix() {
    for p in [2, 4, 8] {
        for delta in [0.0, 0.4, SrrcPam::wss_delta(p)] {
            let x = composite_model(SrrcPam::new(p, delta).unwrap(), 1.0).unwrap();
            let g = FrequencyGrid::new(p, 256).unwrap();
            let rows = subband_eigenvalues(&x, &g).unwrap();
            for i in 1..g.points_per_subband() {
                let a = assemble_cyclic_psd_matrix(&x, g.sigma(i - 1)).unwrap();
                let b = assemble_cyclic_psd_matrix(&x, g.sigma(i)).unwrap();
                let change = (&b.entries - &a.entries).norm();
                for k in 0..p {
                    assert!((rows[i][k] - rows[i - 1][k]).abs() <= change + 1e-12);
                }
            }
        }
    }
}

#[test]
fn stationary_limit_kl_field_is_sorted_cl_field() {
    for p in [2, 4, 8] {
        let g = FrequencyGrid::new(p, 128).unwrap();
        let x = composite_model(SrrcPam::new(p, SrrcPam::wss_delta(p)).unwrap(), 1.0).unwrap();
        let kl = decreasing_rearrangement(&kl_psd_field(&x, &g).unwrap());
        let cl = decreasing_rearrangement(&cl_psd_field(&x, &g));
        for (a, b) in kl.values.iter().zip(&cl.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn filtering_is_independent_of_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let model = SrrcPam::new(4, 0.5).unwrap();
            let s = AdditiveScenario::new(model, 0.7).unwrap();
            let r = generate_realization(&model, 0.7, 1 << 12, 99).unwrap();
            let bank = design_cwf(&s, 1 << 12).unwrap();
            apply_fresh(&bank, &r.x).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}
