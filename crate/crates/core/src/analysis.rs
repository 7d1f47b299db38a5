//! Peak extraction from sampled series and log-log least-squares fits.
//!
//! Peaks are the large excursions of a series away from its baseline, both
//! minima and maxima. Amplitude is measured from the baseline, width is the
//! full width at half that amplitude.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::driven_quench::ModeAmplitudes;
use crate::error::{Error, Result};
use crate::free_evolution::CriticalPropagator;
use crate::observables::{echo_series, sz_series};
use crate::series::{SeriesMeta, TimeGrid, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// 1-based index in time order.
    pub index: usize,
    pub center: f64,
    /// Height above (or depth below) the baseline.
    pub amplitude: f64,
    pub fwhm: f64,
    pub polarity: Polarity,
    /// Fewer than [`PeakOptions::min_fwhm_samples`] samples inside the FWHM.
    pub low_resolution: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    /// Median of the samples outside the peak regions.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    /// Samples before this time are ignored (the initial decay is not a peak).
    pub t_min: f64,
    pub baseline: Baseline,
    /// A peak region is a run of samples whose excursion exceeds this fraction
    /// of the largest excursion.
    pub threshold: f64,
    pub min_fwhm_samples: usize,
}

impl PeakOptions {
    /// Magnetization defaults: `t_min = N/8`, median baseline.
    pub fn magnetization(spins: usize) -> Self {
        Self { t_min: spins as f64 / 8.0, baseline: Baseline::Median, threshold: 0.25, min_fwhm_samples: 5 }
    }

    /// Echo defaults: `t_min = N/8`, baseline pinned to zero.
    pub fn echo(spins: usize) -> Self {
        Self { t_min: spins as f64 / 8.0, baseline: Baseline::Fixed(0.0), threshold: 0.25, min_fwhm_samples: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeakWarning {
    NoExtrema,
    /// A region touched the end of the window and could not be measured.
    Truncated(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
    pub baseline: f64,
    pub warnings: Vec<PeakWarning>,
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m] } else { 0.5 * (xs[m - 1] + xs[m]) })
}

pub fn find_peaks(series: &TimeSeries, opts: &PeakOptions) -> PeakReport {
    find_peaks_in(&series.t, &series.values, opts)
}

/// Peak detection on raw columns; `t` must be uniformly spaced.
pub fn find_peaks_in(t: &[f64], y: &[f64], opts: &PeakOptions) -> PeakReport {
    let start = t.partition_point(|&x| x < opts.t_min);
    let (t, y) = (&t[start..], &y[start..]);
    let empty = |baseline| PeakReport { peaks: Vec::new(), baseline, warnings: alloc::vec![PeakWarning::NoExtrema] };
    if y.len() < 3 {
        return empty(f64::NAN);
    }
    let dt = t[1] - t[0];

    let mut baseline = match opts.baseline {
        Baseline::Fixed(b) => b,
        Baseline::Median => median(y.to_vec()).unwrap_or(0.0),
    };
    let regions = excursion_regions(y, baseline, opts.threshold);
    if regions.is_empty() {
        return empty(baseline);
    }
    if opts.baseline == Baseline::Median {
        let mut outside = alloc::vec![true; y.len()];
        for &(a, b) in &regions {
            let pad = b - a + 1;
            for flag in &mut outside[a.saturating_sub(pad)..(b + pad + 1).min(y.len())] {
                *flag = false;
            }
        }
        let rest: Vec<f64> = y.iter().zip(&outside).filter(|(_, &o)| o).map(|(&v, _)| v).collect();
        if let Some(m) = median(rest) {
            baseline = m;
        }
    }

    let mut peaks = Vec::new();
    let mut warnings = Vec::new();
    for &(a, b) in &regions {
        let m = (a..=b)
            .max_by(|&i, &j| (y[i] - baseline).abs().total_cmp(&(y[j] - baseline).abs()))
            .unwrap();
        if m == 0 || m + 1 >= y.len() {
            warnings.push(PeakWarning::Truncated(m + start));
            continue;
        }
        let (center, extremum) = quadratic_vertex(t[m], dt, y[m - 1], y[m], y[m + 1]);
        let polarity = if extremum >= baseline { Polarity::Max } else { Polarity::Min };
        let amplitude = (extremum - baseline).abs();
        let half = 0.5 * amplitude;
        let exc = |i: usize| (y[i] - baseline).abs();
        let left = (0..m).rev().find(|&i| exc(i) < half);
        let right = (m + 1..y.len()).find(|&i| exc(i) < half);
        let (Some(l), Some(r)) = (left, right) else {
            warnings.push(PeakWarning::Truncated(m + start));
            continue;
        };
        let cross = |i: usize, j: usize| {
            let (ei, ej) = (exc(i), exc(j));
            t[i] + (t[j] - t[i]) * (half - ei) / (ej - ei)
        };
        let fwhm = cross(r - 1, r) - cross(l, l + 1);
        peaks.push(Peak {
            index: 0,
            center,
            amplitude,
            fwhm,
            polarity,
            low_resolution: fwhm / dt < opts.min_fwhm_samples as f64,
        });
    }
    for (i, p) in peaks.iter_mut().enumerate() {
        p.index = i + 1;
    }
    if peaks.is_empty() {
        warnings.push(PeakWarning::NoExtrema);
    }
    PeakReport { peaks, baseline, warnings }
}

/// Maximal runs of samples with `|y − baseline| ≥ threshold · max|y − baseline|`.
fn excursion_regions(y: &[f64], baseline: f64, threshold: f64) -> Vec<(usize, usize)> {
    let peak = y.iter().map(|v| (v - baseline).abs()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Vec::new();
    }
    let level = threshold * peak;
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, v) in y.iter().enumerate() {
        let above = (v - baseline).abs() >= level;
        match (above, open) {
            (true, None) => open = Some(i),
            (false, Some(a)) => {
                out.push((a, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(a) = open {
        out.push((a, y.len() - 1));
    }
    out
}

/// Vertex of the parabola through three equally spaced samples centred at `t`.
fn quadratic_vertex(t: f64, dt: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let curv = y0 - 2.0 * y1 + y2;
    if curv == 0.0 {
        return (t, y1);
    }
    let off = 0.5 * (y0 - y2) / curv;
    let off = off.clamp(-1.0, 1.0);
    (t + off * dt, y1 - 0.25 * (y0 - y2) * off)
}

/// Ordinary least-squares line with one-standard-error uncertainties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub n_points: usize,
    /// Range of the abscissa actually fitted (before any log transform).
    pub window: (f64, f64),
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("fit columns differ in length"));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidArgument("a fit needs at least three points"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("fit data must be finite"));
    }
    let nf = n as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&xi| (xi - xm) * (xi - xm)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("abscissae must not all coincide"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(&xi, &yi)| (xi - xm) * (yi - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    let s2 = rss / (nf - 2.0);
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / nf + xm * xm / sxx)).sqrt(),
        n_points: n,
        window: (lo, hi),
    })
}

/// Fit `ln y = intercept + slope · ln x`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidArgument("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mut fit = linear_fit(&lx, &ly)?;
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    fit.window = (lo, hi);
    Ok(fit)
}

/// Sample `S^z` around the first revival (`N/8 ≤ t ≤ 3N/8`) and return its
/// first peak.
pub fn first_sz_peak(state0: &ModeAmplitudes, propagator: &CriticalPropagator, meta: SeriesMeta) -> Result<Peak> {
    let n = state0.spins() as f64;
    let grid = TimeGrid::new(n / 8.0, 3.0 * n / 8.0, meta.dt)?;
    let series = sz_series(state0, propagator, &grid, meta)?;
    first_peak(&series, &PeakOptions::magnetization(state0.spins()))
}

/// Sample the echo around the first revival (`N/4 ≤ t ≤ 3N/4`) and return
/// its first peak.
pub fn first_echo_peak(state0: &ModeAmplitudes, propagator: &CriticalPropagator, meta: SeriesMeta) -> Result<Peak> {
    let n = state0.spins() as f64;
    let grid = TimeGrid::new(n / 4.0, 3.0 * n / 4.0, meta.dt)?;
    let series = echo_series(state0, propagator, &grid, meta)?;
    first_peak(&series, &PeakOptions::echo(state0.spins()))
}

fn first_peak(series: &TimeSeries, opts: &PeakOptions) -> Result<Peak> {
    find_peaks(series, opts)
        .peaks
        .into_iter()
        .next()
        .ok_or(Error::InvalidArgument("no peak found in the first-revival window"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powi(-2))).collect();
        let f = loglog_fit(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(f.slope_se < 1e-10 && f.intercept_se < 1e-10);
        assert_eq!(f.n_points, 4);
        assert_eq!(f.window, (1.0, 8.0));
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(loglog_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
        assert!(loglog_fit(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn noisy_fit_has_positive_errors() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.1, 1.9, 3.2, 3.9, 5.1];
        let f = linear_fit(&x, &y).unwrap();
        assert!(f.slope_se > 0.0 && f.intercept_se > 0.0);
    }

    #[test]
    fn vertex_of_parabola() {
        let f = |t: f64| 2.0 - (t - 0.3) * (t - 0.3);
        let (c, v) = quadratic_vertex(0.0, 1.0, f(-1.0), f(0.0), f(1.0));
        assert!((c - 0.3).abs() < 1e-12 && (v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_series_warns() {
        let r = find_peaks_in(&[0.0, 1.0, 2.0, 3.0], &[1.0; 4], &PeakOptions::magnetization(8));
        assert!(r.peaks.is_empty());
        assert_eq!(r.warnings, alloc::vec![PeakWarning::NoExtrema]);
    }

    #[test]
    fn detects_alternating_gaussians() {
        let t: Vec<f64> = (0..4000).map(|i| i as f64 * 0.25).collect();
        let w: f64 = 10.0;
        let sigma = w / (2.0 * (2.0 * core::f64::consts::LN_2).sqrt());
        let y: Vec<f64> = t
            .iter()
            .map(|&t| {
                0.5 + 0.1 * (-(t - 250.0).powi(2) / (2.0 * sigma * sigma)).exp()
                    - 0.08 * (-(t - 600.0).powi(2) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let opts = PeakOptions { t_min: 100.0, ..PeakOptions::magnetization(800) };
        let r = find_peaks_in(&t, &y, &opts);
        assert_eq!(r.peaks.len(), 2);
        assert!((r.baseline - 0.5).abs() < 1e-9);
        let (a, b) = (r.peaks[0], r.peaks[1]);
        assert_eq!((a.polarity, b.polarity), (Polarity::Max, Polarity::Min));
        assert!((a.center - 250.0).abs() < 1e-3 && (b.center - 600.0).abs() < 1e-3);
        assert!((a.amplitude - 0.1).abs() < 1e-4 && (b.amplitude - 0.08).abs() < 1e-4);
        assert!((a.fwhm - w).abs() / w < 1e-2 && (b.fwhm - w).abs() / w < 1e-2);
        assert!(!a.low_resolution);
    }
}
