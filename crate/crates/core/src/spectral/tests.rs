use super::*;
use approx::assert_abs_diff_eq;

fn reference_jsa() -> JointSpectralAmplitude {
    build_jsa(PumpParams::default(), PhaseMatching::default(), WavelengthGrid::default()).unwrap()
}

fn reference_filters() -> (FilterSpec, FilterSpec) {
    let f = FilterSpec::new(780.0, 3.0).unwrap();
    (f, f)
}

fn synthetic(grid: WavelengthGrid, f: impl Fn(usize, usize) -> Complex64) -> JointSpectralAmplitude {
    let n = grid.len();
    let mut m = SpectralMatrix::from_fn(n, n, f);
    let norm = m.norm();
    m /= Complex64::new(norm, 0.0);
    JointSpectralAmplitude {
        grid,
        amplitude: m,
        pump: PumpParams::default(),
        phase_matching: PhaseMatching::default(),
    }
}

fn delays() -> Vec<f64> {
    (-100..=100).map(|k| 20.0 * k as f64).collect()
}

#[test]
fn grid_validation() {
    assert!(WavelengthGrid::uniform(800.0, 760.0, 256).is_err());
    assert!(WavelengthGrid::from_wavelengths(vec![760.0, 760.0, 770.0]).is_err());
    let small = WavelengthGrid::uniform(760.0, 800.0, 64).unwrap();
    assert!(matches!(
        build_jsa(PumpParams::default(), PhaseMatching::default(), small),
        Err(Error::InvalidGrid(_))
    ));
}

#[test]
fn jsa_is_normalized_and_exchange_symmetric() {
    let jsa = reference_jsa();
    assert_abs_diff_eq!(jsa.amplitude.norm_squared(), 1.0, epsilon = 1e-12);
    assert!(jsa.exchange_asymmetry() <= 1e-12);
}

#[test]
fn unfiltered_pairs_are_strongly_correlated() {
    // the grid clips the band, so K counts only the modes inside 760–800 nm
    let s = schmidt(&reference_jsa());
    assert!(s.k > 3.0, "K = {}", s.k);
    // phase matching alone stays above half amplitude 20 nm from degeneracy,
    // more than six filter widths
    let nu = angular_frequency(760.0) - angular_frequency(780.0);
    assert!(PhaseMatching::default().amplitude(0.0, 2.0 * nu) > 0.5);
}

#[test]
fn long_pulses_confine_the_amplitude_to_energy_conservation() {
    let pump = PumpParams {
        center_nm: 390.0,
        duration_fs: 1e6,
    };
    let jsa = build_jsa(pump, PhaseMatching::default(), WavelengthGrid::default()).unwrap();
    let omega = jsa.grid.frequencies();
    let spacing = omega.windows(2).map(|w| (w[0] - w[1]).abs()).fold(0.0, f64::max);
    let omega_p = angular_frequency(390.0);
    let mut off_ridge = 0.0;
    for s in 0..omega.len() {
        for i in 0..omega.len() {
            if (omega[s] + omega[i] - omega_p).abs() > spacing {
                off_ridge += jsa.amplitude[(s, i)].norm_sqr();
            }
        }
    }
    assert!(off_ridge < 1e-12, "weight off the ridge {off_ridge}");
}

#[test]
fn filtering_purifies() {
    let (fs, fi) = reference_filters();
    let (filtered, transmission) = apply_filters(&reference_jsa(), fs, fi).unwrap();
    assert!(transmission > 0.0 && transmission < 1.0);
    let s = schmidt(&filtered);
    eprintln!("filtered K = {:.5}, purity = {:.5}", s.k, s.purity);
    assert!(s.k <= 1.05, "K = {}", s.k);
    assert!(s.purity >= 0.95);
}

#[test]
fn open_and_disjoint_filters() {
    let jsa = reference_jsa();
    let open = FilterSpec::new(780.0, f64::INFINITY).unwrap();
    let (same, t) = apply_filters(&jsa, open, open).unwrap();
    assert_abs_diff_eq!(t, 1.0, epsilon = 1e-12);
    assert!((&same.amplitude - &jsa.amplitude).camax() < 1e-15);

    let far = FilterSpec::new(1550.0, 3.0).unwrap();
    assert!(matches!(apply_filters(&jsa, far, far), Err(Error::ZeroTransmission)));
    assert!(FilterSpec::new(780.0, 0.0).is_err());
}

#[test]
fn schmidt_examples() {
    let grid = WavelengthGrid::uniform(770.0, 790.0, 128).unwrap();
    let w = grid.wavelengths().to_vec();
    let g = |x: f64, c: f64| (-(x - c).powi(2) / 4.0).exp();
    let product = synthetic(grid.clone(), |s, i| Complex64::new(g(w[s], 780.0) * g(w[i], 781.0), 0.0));
    assert_abs_diff_eq!(schmidt(&product).k, 1.0, epsilon = 1e-10);

    // two orthogonal product terms of equal weight
    let rank_two = synthetic(grid, |s, i| {
        Complex64::new(
            g(w[s], 774.0) * g(w[i], 786.0) + g(w[s], 786.0) * g(w[i], 774.0),
            0.0,
        )
    });
    assert_abs_diff_eq!(schmidt(&rank_two).k, 2.0, epsilon = 1e-6);
}

#[test]
fn svd_reconstructs_the_amplitude() {
    let (fs, fi) = reference_filters();
    let (jsa, _) = apply_filters(&reference_jsa(), fs, fi).unwrap();
    let svd = jsa.amplitude.clone().svd(true, true);
    let rebuilt = svd.recompose().unwrap();
    assert!((&rebuilt - &jsa.amplitude).camax() < 1e-10);
    let s = schmidt(&jsa);
    assert_abs_diff_eq!(s.lambdas.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    assert!(s.lambdas.iter().all(|&l| l >= 0.0));
}

#[test]
fn same_pair_dip() {
    let (fs, fi) = reference_filters();
    let (jsa, _) = apply_filters(&reference_jsa(), fs, fi).unwrap();
    let curve = hom_curve(&jsa, &delays(), HomMode::SamePair).unwrap();
    // exchange symmetric: perfect overlap at zero delay
    assert_abs_diff_eq!(curve.visibility, 1.0, epsilon = 1e-9);
    assert!(curve.visibility >= 0.99);
    assert!(curve.rates.iter().all(|&r| r >= 0.0));
    assert_abs_diff_eq!(curve.rates[0], 0.5, epsilon = 1e-3);
    assert_abs_diff_eq!(*curve.rates.last().unwrap(), 0.5, epsilon = 1e-3);
    assert!(curve.fitted_visibility > 0.9);
    assert_abs_diff_eq!(curve.fit_center_fs, 0.0, epsilon = 1e-6);
}

#[test]
fn independent_sources_see_the_purity() {
    let (fs, fi) = reference_filters();
    let (filtered, _) = apply_filters(&reference_jsa(), fs, fi).unwrap();
    let narrow = FilterSpec::new(780.0, 10.0).unwrap();
    let (wide, _) = apply_filters(&reference_jsa(), narrow, narrow).unwrap();
    for jsa in [filtered, wide] {
        let curve = hom_curve(&jsa, &[0.0], HomMode::IndependentSources).unwrap();
        assert_abs_diff_eq!(curve.visibility, schmidt(&jsa).purity, epsilon = 1e-6);
    }
}

#[test]
fn narrower_filters_never_raise_k() {
    let jsa = reference_jsa();
    let mut last = schmidt(&jsa).k;
    for fwhm in [40.0, 20.0, 10.0, 6.0, 3.0, 1.5] {
        let f = FilterSpec::new(780.0, fwhm).unwrap();
        let (filtered, _) = apply_filters(&jsa, f, f).unwrap();
        let k = schmidt(&filtered).k;
        assert!(k <= last + 1e-9, "FWHM {fwhm}: K {k} after {last}");
        last = k;
    }
}

#[test]
fn noise_subtraction() {
    let v = noise_subtracted_visibility(0.95, 0.025, 0.0006, 0.00002).unwrap();
    assert!((v - 0.996).abs() <= 0.01, "{v}");
    assert_abs_diff_eq!(noise_subtracted_visibility(0.95, 0.025, 0.0, 0.0).unwrap(), 0.95, epsilon = 1e-15);
    assert!(subtract_floor(0.95, 0.2).is_err());
    assert!(subtract_floor(1.2, 0.0).is_err());
}

#[test]
fn csv_exports() {
    let grid = WavelengthGrid::uniform(770.0, 790.0, 128).unwrap();
    let jsa = build_jsa(PumpParams::default(), PhaseMatching::default(), grid).unwrap();
    let mut buf = Vec::new();
    jsa.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("wavelength_s,wavelength_i,re,im,abs2\n"));
    assert_eq!(text.lines().count(), 1 + 128 * 128);

    let curve = hom_curve(&jsa, &[-100.0, 0.0, 100.0], HomMode::SamePair).unwrap();
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("delay_fs,rate,fit\n"));
    assert_eq!(text.lines().count(), 4);
}
