//! Parameter scans over `τ_Q` or `N`. Cells run in parallel and the table is
//! returned in input order.

use std::f64::consts::FRAC_2_PI;

use critquench_core::analysis::{first_echo_peak, first_sz_peak, loglog_fit, FitResult};
use critquench_core::approximations::echo_revival_fwhm_leading;
use critquench_core::driven_quench::{DriveOptions, DEFAULT_G_START, DEFAULT_TOL};
use critquench_core::observables::{ground_state_probability, transverse_magnetization};
use critquench_core::series::default_dt;
use critquench_core::{CriticalPropagator, KzScales, MomentumGrid, QuenchProtocol, SeriesMeta};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{parallel, Error, Result};

/// Samples per predicted echo revival width.
const ECHO_SAMPLES_PER_WIDTH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "tau_Q")]
    pub tau_q: f64,
    #[serde(rename = "N")]
    pub spins: usize,
    pub p_gs: f64,
    pub sz0_minus_2pi: f64,
    /// First magnetization peak amplitude.
    #[serde(rename = "A")]
    pub a: f64,
    /// First magnetization peak FWHM.
    #[serde(rename = "W")]
    pub w: f64,
    /// First echo revival FWHM.
    #[serde(rename = "Wtilde")]
    pub w_tilde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub g_start: f64,
    pub tol: f64,
    /// Magnetization sampling step; `None` uses [`default_dt`].
    pub dt: Option<f64>,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { g_start: DEFAULT_G_START, tol: DEFAULT_TOL, dt: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub warnings: Vec<String>,
}

/// Quantity fitted against the scanned parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanObservable {
    /// `−ln p_GS`, so the fit gives the slope of `ln(−ln p_GS)`.
    Pgs,
    Sz0,
    PeakAmplitude,
    PeakWidth,
    EchoWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    TauQ,
    Spins,
}

/// Drive one `(N, τ_Q)` cell and measure every tabulated quantity.
pub fn evaluate_cell(spins: usize, tau_q: f64, settings: &ScanSettings) -> Result<ScanRow> {
    let grid = MomentumGrid::new(spins)?;
    let protocol = QuenchProtocol::new(tau_q, settings.g_start)?;
    let state0 = parallel::drive_to_critical(&protocol, &grid, &DriveOptions::with_tol(settings.tol))?;
    let propagator = CriticalPropagator::new(&grid);
    let dt = settings.dt.unwrap_or_else(|| default_dt(tau_q));
    let meta = SeriesMeta { spins, tau_q, g_start: settings.g_start, dt };
    let sz_peak = first_sz_peak(&state0, &propagator, meta)?;
    let echo_dt = dt.min(echo_revival_fwhm_leading(spins, tau_q) / ECHO_SAMPLES_PER_WIDTH);
    let echo_peak = first_echo_peak(&state0, &propagator, SeriesMeta { dt: echo_dt, ..meta })?;
    Ok(ScanRow {
        tau_q,
        spins,
        p_gs: ground_state_probability(&state0).value,
        sz0_minus_2pi: transverse_magnetization(&state0) - FRAC_2_PI,
        a: sz_peak.amplitude,
        w: sz_peak.fwhm,
        w_tilde: echo_peak.fwhm,
    })
}

pub fn scan_tau_q(spins: usize, taus: &[f64], settings: &ScanSettings) -> Result<ScanTable> {
    scan_cells(taus.iter().map(|&t| (spins, t)).collect(), settings)
}

pub fn scan_system_size(tau_q: f64, sizes: &[usize], settings: &ScanSettings) -> Result<ScanTable> {
    scan_cells(sizes.iter().map(|&n| (n, tau_q)).collect(), settings)
}

fn scan_cells(cells: Vec<(usize, f64)>, settings: &ScanSettings) -> Result<ScanTable> {
    if cells.is_empty() {
        return Err(Error::Config("scan needs at least one cell".into()));
    }
    let mut warnings = Vec::new();
    for &(n, tau) in &cells {
        let scales = KzScales::new(n, tau)?;
        if !scales.is_large_system() {
            warnings.push(format!(
                "N={n}, tau_Q={tau}: N/sqrt(tau_Q) = {:.1} is below {}; finite-size effects are not negligible",
                scales.size_ratio,
                critquench_core::lattice::LARGE_SYSTEM_RATIO
            ));
        }
    }
    let rows = cells
        .par_iter()
        .map(|&(n, tau)| evaluate_cell(n, tau, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable { rows, warnings })
}

/// Log-log fit of `obs` against the scanned parameter.
pub fn fit(rows: &[ScanRow], vary: Vary, obs: ScanObservable) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let x = match vary {
                Vary::TauQ => r.tau_q,
                Vary::Spins => r.spins as f64,
            };
            let y = match obs {
                ScanObservable::Pgs => -r.p_gs.ln(),
                ScanObservable::Sz0 => r.sz0_minus_2pi,
                ScanObservable::PeakAmplitude => r.a,
                ScanObservable::PeakWidth => r.w,
                ScanObservable::EchoWidth => r.w_tilde,
            };
            (x, y)
        })
        .collect();
    Ok(loglog_fit(&points)?)
}
