//! Closed-form small-momentum approximations of the quench and of the free
//! evolution that follows it.
//!
//! All of them keep only the leading orders in `k√τ_Q`, with the Gaussian
//! cutoff `exp(−πτ_Q k²/4)` on the non-equilibrium amplitudes.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::driven_quench::ModeAmplitudes;
use crate::error::Result;
use crate::free_evolution::{dispersion, Dispersion};
use crate::lattice::MomentumGrid;
use crate::quadrature::adaptive_simpson;
use crate::sum::neumaier;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Below this quench time the expansion in `k√τ_Q` is not trustworthy.
pub const MIN_RELIABLE_TAU_Q: f64 = 10.0;
/// Gaussian terms are summed while `|t − t_s| ≤ GAUSS_REACH · σ`; the first
/// dropped term is below `1e−16`.
const GAUSS_REACH: f64 = 6.1;
/// Upper limit of the integral defining `C`; the tail beyond it is below `1e−12`.
const C_UPPER: f64 = 10.0;

/// Approximate arrival amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxAmplitudes {
    pub state: ModeAmplitudes,
    pub tau_q: f64,
}

impl ApproxAmplitudes {
    pub fn is_reliable(&self) -> bool {
        self.tau_q >= MIN_RELIABLE_TAU_Q
    }
}

/// `(v, u)` at the critical point for scaled momentum `x = k√τ_Q`:
///
/// ```text
/// v ≈ x √(π/2) G,   u ≈ G e^{−iπ/4} [1 + (i/2) x² (γ + ln 2)],   G = e^{−π x²/4}
/// ```
pub fn approx_mode(x: f64) -> (Complex64, Complex64) {
    let cutoff = (-PI * x * x / 4.0).exp();
    let v = Complex64::new(x * (PI / 2.0).sqrt() * cutoff, 0.0);
    let bracket = Complex64::new(1.0, 0.5 * x * x * (EULER_GAMMA + LN_2));
    let u = Complex64::from_polar(cutoff, -PI / 4.0) * bracket;
    (v, u)
}

pub fn approx_amplitudes(grid: &MomentumGrid, tau_q: f64) -> Result<ApproxAmplitudes> {
    let sq = tau_q.sqrt();
    let (v, u) = grid.momenta().iter().map(|&k| approx_mode(k * sq)).unzip();
    Ok(ApproxAmplitudes { state: ModeAmplitudes::new(grid.clone(), v, u, 0.0)?, tau_q })
}

/// Excitation probability from the approximate amplitudes with
/// `v_c ≈ u_c ≈ 1/√2`:
/// `p(x) = (1/8) e^{−πx²/2} [(x√π − 2)² + (x√π − x²(γ + ln 2))²]`.
pub fn approx_excitation(x: f64) -> f64 {
    let (v, u) = approx_mode(x);
    ((u - v) * FRAC_1_SQRT_2).norm_sqr()
}

pub fn approx_excitation_probabilities(grid: &MomentumGrid, tau_q: f64) -> Vec<f64> {
    let sq = tau_q.sqrt();
    grid.momenta().iter().map(|&k| approx_excitation(k * sq)).collect()
}

fn c_integrand(x: f64) -> f64 {
    let sp = PI.sqrt();
    let a = x * sp - 2.0;
    let b = x * sp - x * x * (EULER_GAMMA + LN_2);
    (-(-PI * x * x / 2.0).exp() / 8.0 * (a * a + b * b)).ln_1p()
}

/// `C = −(1/2π) ∫₀^∞ ln(1 − p(x)) dx` with `p` from [`approx_excitation`].
pub fn constant_c() -> Result<f64> {
    let q = adaptive_simpson(c_integrand, 0.0, C_UPPER, 1e-12)?;
    Ok(-q.value / (2.0 * PI))
}

/// `p_GS ≈ exp(−C N/√τ_Q)`.
pub fn pgs_approx(spins: usize, tau_q: f64, c: f64) -> f64 {
    (-c * spins as f64 / tau_q.sqrt()).exp()
}

/// Time-dependent part of the leading-order magnetization series,
/// `−(4/N) Σ_k [sin²(εt) + (√π/2)k√τ sin(2εt) + (π/2)k²τ cos²(εt)] e^{−πτk²/2}`.
pub fn sz_leading_series(grid: &MomentumGrid, tau_q: f64, t: f64) -> f64 {
    let sq = tau_q.sqrt();
    let sum = neumaier(grid.momenta().iter().map(|&k| {
        let x = k * sq;
        let (s, c) = (dispersion(k) * t).sin_cos();
        let bracket = s * s + 0.5 * PI.sqrt() * x * (2.0 * s * c) + 0.5 * PI * x * x * c * c;
        bracket * (-PI * x * x / 2.0).exp()
    }));
    -4.0 / grid.spins() as f64 * sum
}

/// Peak amplitude of the Gaussian train, `1/(π√(2τ_Q))`.
pub fn peak_train_amplitude(tau_q: f64) -> f64 {
    1.0 / (PI * (2.0 * tau_q).sqrt())
}

/// Full width at half maximum of a train peak, `√(π ln2/2) √τ_Q`.
pub fn peak_train_fwhm(tau_q: f64) -> f64 {
    (PI * LN_2 / 2.0).sqrt() * tau_q.sqrt()
}

/// Time-dependent part of the anti-periodic Gaussian peak train,
/// `(1/(π√(2τ))) Σ_{s≥0} (−1)^s exp(−8(t − sN/4)²/(πτ))`.
pub fn sz_gaussian_train(spins: usize, tau_q: f64, t: f64) -> f64 {
    let period = spins as f64 / 4.0;
    let width = (PI * tau_q / 8.0).sqrt();
    let sum = gaussian_comb(t, period, width, true);
    peak_train_amplitude(tau_q) * sum
}

/// `Σ_{s≥0} (±1)^s exp(−(t − s·period)²/width²)`, truncated.
fn gaussian_comb(t: f64, period: f64, width: f64, alternating: bool) -> f64 {
    let reach = GAUSS_REACH * width;
    let lo = ((t - reach) / period).ceil().max(0.0) as i64;
    let hi = ((t + reach) / period).floor() as i64;
    let mut sum = 0.0;
    for s in lo..=hi {
        let d = (t - s as f64 * period) / width;
        let sign = if alternating && s % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * (-d * d).exp();
    }
    sum
}

/// `ln L ≈ Σ_k ln(1 − sin²(ε_k t) e^{−πτ_Q k²})`.
pub fn echo_product_approx(grid: &MomentumGrid, tau_q: f64, t: f64, kind: Dispersion) -> f64 {
    neumaier(grid.momenta().iter().map(|&k| {
        let e = match kind {
            Dispersion::Exact => dispersion(k),
            Dispersion::Linearized => 2.0 * k,
        };
        let s = (e * t).sin();
        (-s * s * (-PI * tau_q * k * k).exp()).ln_1p()
    }))
}

/// Thermodynamic-limit echo with restored `N/2` periodicity,
/// `exp(−(N/(8π√τ)) (1 − Σ_{s≥0} e^{−4(t − sN/2)²/(πτ)}))`.
pub fn echo_gaussian_revivals(spins: usize, tau_q: f64, t: f64) -> f64 {
    echo_gaussian_revivals_log(spins, tau_q, t).exp()
}

pub fn echo_gaussian_revivals_log(spins: usize, tau_q: f64, t: f64) -> f64 {
    let n = spins as f64;
    let width = (PI * tau_q / 4.0).sqrt();
    let comb = gaussian_comb(t, n / 2.0, width, false);
    -n / (8.0 * PI * tau_q.sqrt()) * (1.0 - comb)
}

/// Full width at half maximum of a Gaussian revival,
/// `√(−πτ ln(1 − 8π√τ ln2 / N))`. `None` when the revival never drops to
/// half height (`N ≤ 8π√τ ln2`).
pub fn echo_revival_fwhm(spins: usize, tau_q: f64) -> Option<f64> {
    let y = 8.0 * PI * tau_q.sqrt() * LN_2 / spins as f64;
    (y < 1.0).then(|| (-PI * tau_q * (-y).ln_1p()).sqrt())
}

/// Large-`N` form of [`echo_revival_fwhm`], `2π√(2 ln2) τ^{3/4}/√N`.
pub fn echo_revival_fwhm_leading(spins: usize, tau_q: f64) -> f64 {
    2.0 * PI * (2.0 * LN_2).sqrt() * tau_q.powf(0.75) / (spins as f64).sqrt()
}
