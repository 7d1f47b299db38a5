use critquench_core::analysis::{find_peaks, find_peaks_in, linear_fit, loglog_fit, Baseline, PeakOptions, Polarity};
use critquench_core::approximations::{peak_train_amplitude, peak_train_fwhm, sz_gaussian_train};
use critquench_core::driven_quench::{drive_to_critical, DEFAULT_TOL};
use critquench_core::observables::sz_series;
use critquench_core::series::{default_dt, TimeGrid};
use critquench_core::{CriticalPropagator, MomentumGrid, QuenchProtocol, SeriesMeta};

#[test]
fn recovers_synthetic_gaussian_trains() {
    for (n, tau) in [(2000, 100.0), (2000, 400.0), (4000, 50.0)] {
        let w = peak_train_fwhm(tau);
        let dt = w / 20.0;
        let t: Vec<f64> = (0..((n as f64 * 1.2) / dt) as usize).map(|i| i as f64 * dt).collect();
        let y: Vec<f64> = t.iter().map(|&t| sz_gaussian_train(n, tau, t)).collect();
        let opts = PeakOptions { baseline: Baseline::Fixed(0.0), ..PeakOptions::magnetization(n) };
        let report = find_peaks_in(&t, &y, &opts);
        assert!(report.peaks.len() >= 4);
        let a = peak_train_amplitude(tau);
        for (i, p) in report.peaks.iter().enumerate() {
            assert!((p.amplitude / a - 1.0).abs() < 0.01, "n={n} tau={tau}: A {}", p.amplitude);
            assert!((p.fwhm / w - 1.0).abs() < 0.01, "n={n} tau={tau}: W {}", p.fwhm);
            assert!((p.center - (i + 1) as f64 * n as f64 / 4.0).abs() < dt);
            let want = if i % 2 == 0 { Polarity::Min } else { Polarity::Max };
            assert_eq!(p.polarity, want);
        }
    }
}

#[test]
fn median_baseline_is_recovered() {
    let (n, tau) = (2000, 100.0);
    let offset = 0.6;
    let dt = 0.5;
    let t: Vec<f64> = (0..4000).map(|i| i as f64 * dt).collect();
    let y: Vec<f64> = t.iter().map(|&t| offset + sz_gaussian_train(n, tau, t)).collect();
    let report = find_peaks_in(&t, &y, &PeakOptions::magnetization(n));
    assert!((report.baseline - offset).abs() < 1e-6);
    assert!((report.peaks[0].amplitude / peak_train_amplitude(tau) - 1.0).abs() < 0.01);
}

#[test]
fn flat_series_has_no_peaks() {
    let t: Vec<f64> = (0..100).map(f64::from).collect();
    let report = find_peaks_in(&t, &[0.3; 100], &PeakOptions::magnetization(8));
    assert!(report.peaks.is_empty());
    assert!(!report.warnings.is_empty());
}

#[test]
fn noiseless_power_law_fits_exactly() {
    let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&x| (x, 0.7 * f64::powf(x, 0.757))).collect();
    let fit = loglog_fit(&pts).unwrap();
    assert!((fit.slope - 0.757).abs() < 1e-12);
    assert!((fit.intercept - 0.7f64.ln()).abs() < 1e-12);
    assert!(fit.slope_se < 1e-10 && fit.intercept_se < 1e-10);
    for (x, y) in pts {
        assert!((fit.predict(x.ln()) - y.ln()).abs() < 1e-12);
    }
}

#[test]
fn fits_reject_bad_input() {
    assert!(loglog_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 2.0)]).is_err());
    assert!(loglog_fit(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
    assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn magnetization_peaks_are_equally_spaced() {
    let (n, tau) = (1000, 50.0);
    let grid = MomentumGrid::new(n).unwrap();
    let protocol = QuenchProtocol::with_default_start(tau).unwrap();
    let s = drive_to_critical(&protocol, &grid, DEFAULT_TOL).unwrap();
    let prop = CriticalPropagator::new(&grid);
    let meta = SeriesMeta { spins: n, tau_q: tau, g_start: 5.0, dt: default_dt(tau) };
    let series = sz_series(&s, &prop, &TimeGrid::from_zero(1.6 * n as f64, meta.dt).unwrap(), meta).unwrap();
    let peaks = find_peaks(&series, &PeakOptions::magnetization(n)).peaks;
    assert!(peaks.len() >= 5);
    let spacing: Vec<f64> = peaks.windows(2).map(|w| w[1].center - w[0].center).collect();
    let mean = spacing.iter().sum::<f64>() / spacing.len() as f64;
    assert!(spacing.iter().all(|s| (s / mean - 1.0).abs() < 0.005), "{spacing:?}");
    assert!((mean / (n as f64 / 4.0) - 1.0).abs() < 0.002);
    assert!(peaks.windows(2).all(|w| w[1].amplitude < w[0].amplitude));
    assert!(peaks.windows(2).all(|w| w[1].fwhm > w[0].fwhm));
}
