use cyclo_bounds_web::tables::{
    mmse_curves, spectra, sync_gain_curve, GAIN_COLUMNS, MMSE_COLUMNS, SPECTRA_COLUMNS,
};

#[test]
fn spectra_rows() {
    let t = spectra(4, 0.0, 1.0, 8).unwrap();
    assert_eq!(t.len(), 32 * SPECTRA_COLUMNS);
    let first = &t[..SPECTRA_COLUMNS];
    assert!((first[0] - 1.0 / 64.0).abs() < 1e-15);
    assert!((first[2] - 5.0).abs() < 1e-9);
    let last = &t[t.len() - SPECTRA_COLUMNS..];
    assert!((last[2] - 1.0).abs() < 1e-9);
}

#[test]
fn mmse_rows() {
    let t = mmse_curves(4, 0.0, &[0.0, 10.0], 64).unwrap();
    assert_eq!(t.len(), 2 * MMSE_COLUMNS);
    assert!((t[1] - 0.2).abs() < 1e-12);
    assert!((t[3] - 5f64.powf(0.25)).abs() < 1e-9);
    for row in t.chunks(MMSE_COLUMNS) {
        assert!(row[1] <= row[4] && row[2] <= row[5] && row[3] <= row[6] + 1e-12);
    }
}

#[test]
fn gain_curve_ends_at_one() {
    let t = sync_gain_curve(4, 30.0, 5, 64).unwrap();
    assert_eq!(t.len(), 5 * GAIN_COLUMNS);
    let last = &t[4 * GAIN_COLUMNS..];
    assert_eq!(last[0], 1.0);
    for v in &last[1..] {
        assert!((v - 1.0).abs() < 1e-9);
    }
    assert!(t[1] > 1.9);
}

#[test]
fn bad_input_is_an_error() {
    assert!(spectra(1, 0.0, 1.0, 32).is_err());
    assert!(mmse_curves(4, 5.0, &[0.0], 32).is_err());
    assert!(sync_gain_curve(4, 30.0, 8, 1).is_err());
}
