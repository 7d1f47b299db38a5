//! Linear ramp `g(t) = 1 − t/τ_Q` from a paramagnetic start to the critical
//! point, integrated mode by mode.
//!
//! Each mode obeys `i d/dt (v, u)ᵀ = h_k(t) (v, u)ᵀ` with
//! `h_k = 2 [[g − cos k, −sin k], [−sin k, cos k − g]]`. The default
//! [`Frame::Adiabatic`] integrates the same equation after the exact change of
//! variables
//!
//! ```text
//! (v, u) = a e^{iφ} |g(t)⟩ + b e^{−iφ} |e(t)⟩,   φ(t) = ∫₀ᵗ 2E dt',
//! a' =  (θ'/2) b e^{−2iφ},   b' = −(θ'/2) a e^{2iφ},
//! ```
//!
//! where `|g⟩ = (sin θ/2, cos θ/2)`, `|e⟩ = (cos θ/2, −sin θ/2)`,
//! `E = √((g − cos k)² + sin²k)` and `θ' = sin k / (τ_Q E²)`. The dynamic phase
//! is known in closed form for a linear ramp, so the integrator only has to
//! follow the slow non-adiabatic coupling. [`Frame::Lab`] integrates `h_k`
//! directly and serves as the independent reference.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, IntegrationFailure, Result};
use crate::lattice::{equilibrium_mode, MomentumGrid};
use crate::ode::{Dopri5, Stats, Tolerance};

pub const DEFAULT_G_START: f64 = 5.0;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Hard limit on `| |u|² + |v|² − 1 |` after the ramp.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Largest advance of the coupling phase `2φ` allowed in one adiabatic-frame
/// step. Keeps the embedded error estimate from aliasing fast oscillations.
const MAX_PHASE_STEP: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchProtocol {
    tau_q: f64,
    g_start: f64,
}

impl QuenchProtocol {
    pub fn new(tau_q: f64, g_start: f64) -> Result<Self> {
        if !(tau_q > 0.0) || !tau_q.is_finite() {
            return Err(Error::InvalidArgument("quench time must be positive and finite"));
        }
        if !(g_start > 1.0) || !g_start.is_finite() {
            return Err(Error::InvalidArgument("ramp must start in the paramagnetic phase (g_start > 1)"));
        }
        Ok(Self { tau_q, g_start })
    }

    pub fn with_default_start(tau_q: f64) -> Result<Self> {
        Self::new(tau_q, DEFAULT_G_START)
    }

    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    pub fn g_start(&self) -> f64 {
        self.g_start
    }

    pub fn t_start(&self) -> f64 {
        -(self.g_start - 1.0) * self.tau_q
    }

    /// Field during the ramp; the critical value 1 afterwards.
    pub fn field(&self, t: f64) -> f64 {
        if t <= 0.0 {
            1.0 - t / self.tau_q
        } else {
            1.0
        }
    }
}

/// Per-momentum Bogoliubov pairs: the complete state of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    grid: MomentumGrid,
    pub v: Vec<Complex64>,
    pub u: Vec<Complex64>,
    pub time: f64,
}

impl ModeAmplitudes {
    pub fn new(grid: MomentumGrid, v: Vec<Complex64>, u: Vec<Complex64>, time: f64) -> Result<Self> {
        if v.len() != grid.len() || u.len() != grid.len() {
            return Err(Error::InvalidArgument("amplitude count must match the grid"));
        }
        Ok(Self { grid, v, u, time })
    }

    /// Instantaneous ground state at field `g`, real and non-negative.
    pub fn equilibrium(grid: &MomentumGrid, g: f64, time: f64) -> Result<Self> {
        let eq = crate::lattice::EquilibriumModes::new(grid, g)?;
        let v = eq.v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let u = eq.u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(Self { grid: grid.clone(), v, u, time })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn spins(&self) -> usize {
        self.grid.spins()
    }

    pub fn momenta(&self) -> &[f64] {
        self.grid.momenta()
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Largest `| |u_k|² + |v_k|² − 1 |` over modes.
    pub fn max_norm_drift(&self) -> f64 {
        self.v
            .iter()
            .zip(&self.u)
            .map(|(v, u)| (v.norm_sqr() + u.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    Adiabatic,
    Lab,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveOptions {
    pub tol: f64,
    pub frame: Frame,
}

impl Default for DriveOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, frame: Frame::Adiabatic }
    }
}

impl DriveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(Error::InvalidArgument("tolerance must lie in (0, 1e-4]"));
        }
        Ok(())
    }
}

/// One mode at the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenMode {
    pub v: Complex64,
    pub u: Complex64,
    pub norm_drift: f64,
    pub stats: Stats,
}

/// Integrate a single mode through the ramp and return `(v_k(0), u_k(0))`.
pub fn drive_mode(k: f64, protocol: &QuenchProtocol, opts: &DriveOptions) -> Result<DrivenMode> {
    opts.validate()?;
    if !(k > 0.0 && k < core::f64::consts::PI) {
        return Err(Error::InvalidArgument("momentum must lie in (0, π)"));
    }
    let mode = match opts.frame {
        Frame::Adiabatic => drive_adiabatic(k, protocol, opts.tol),
        Frame::Lab => drive_lab(k, protocol, opts.tol),
    }
    .map_err(|e| e.at_mode(k))?;
    if mode.norm_drift > MAX_NORM_DRIFT {
        return Err(Error::Integration {
            k: Some(k),
            reason: IntegrationFailure::NormDrift { drift: mode.norm_drift },
        });
    }
    Ok(mode)
}

/// Drive every mode of `grid` to the critical point with the default frame.
pub fn drive_to_critical(protocol: &QuenchProtocol, grid: &MomentumGrid, tol: f64) -> Result<ModeAmplitudes> {
    drive_to_critical_with(protocol, grid, &DriveOptions::with_tol(tol))
}

pub fn drive_to_critical_with(
    protocol: &QuenchProtocol,
    grid: &MomentumGrid,
    opts: &DriveOptions,
) -> Result<ModeAmplitudes> {
    let modes = grid
        .momenta()
        .iter()
        .map(|&k| drive_mode(k, protocol, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(grid, &modes))
}

/// Collect independently driven modes (in grid order) into a state at `t = 0`.
pub fn assemble(grid: &MomentumGrid, modes: &[DrivenMode]) -> ModeAmplitudes {
    let v = modes.iter().map(|m| m.v).collect();
    let u = modes.iter().map(|m| m.u).collect();
    ModeAmplitudes { grid: grid.clone(), v, u, time: 0.0 }
}

fn norm_drift(v: Complex64, u: Complex64) -> f64 {
    (v.norm_sqr() + u.norm_sqr() - 1.0).abs()
}

fn drive_lab(k: f64, protocol: &QuenchProtocol, tol: f64) -> Result<DrivenMode> {
    let (c, s) = (k.cos(), k.sin());
    let (u0, v0) = equilibrium_mode(k, protocol.g_start());
    let tau = protocol.tau_q;
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |t: f64, y: &[Complex64; 2], dy: &mut [Complex64; 2]| {
        let d = 2.0 * (1.0 - t / tau - c);
        let off = -2.0 * s;
        dy[0] = minus_i * (y[0] * d + y[1] * off);
        dy[1] = minus_i * (y[0] * off - y[1] * d);
    };
    let solver = Dopri5::new(Tolerance::uniform(tol));
    let y0 = [Complex64::new(v0, 0.0), Complex64::new(u0, 0.0)];
    let (y, stats) = solver.integrate(rhs, protocol.t_start(), 0.0, y0, |_| f64::INFINITY)?;
    Ok(DrivenMode { v: y[0], u: y[1], norm_drift: norm_drift(y[0], y[1]), stats })
}

/// Closed-form pieces of the adiabatic-frame equations for one mode.
struct AdiabaticMode {
    cos_k: f64,
    sin_k: f64,
    tau_q: f64,
    /// Antiderivative of `E` at the critical point, `F(1 − cos k)`.
    f_crit: f64,
}

impl AdiabaticMode {
    fn new(k: f64, tau_q: f64) -> Self {
        let (cos_k, sin_k) = (k.cos(), k.sin());
        let mut m = Self { cos_k, sin_k, tau_q, f_crit: 0.0 };
        m.f_crit = m.antiderivative(1.0 - cos_k);
        m
    }

    /// `∫₀ˣ √(y² + sin²k) dy`.
    fn antiderivative(&self, x: f64) -> f64 {
        let s = self.sin_k;
        0.5 * (x * x.hypot(s) + s * s * (x / s).asinh())
    }

    fn detuning(&self, t: f64) -> f64 {
        1.0 - t / self.tau_q - self.cos_k
    }

    /// `φ(t) = ∫₀ᵗ 2E dt'`.
    fn phase(&self, t: f64) -> f64 {
        2.0 * self.tau_q * (self.f_crit - self.antiderivative(self.detuning(t)))
    }

    fn energy(&self, t: f64) -> f64 {
        self.detuning(t).hypot(self.sin_k)
    }

    /// Half the rotation rate `w = θ'/2 = sin k / (2τ_Q E²)`, the first-order
    /// adiabatic response `ρ = w/(4E)` and its derivative
    /// `ρ' = 3 sin k (g − cos k) / (8 τ_Q² E⁵)`.
    fn couplings(&self, t: f64) -> (f64, f64, f64) {
        let x = self.detuning(t);
        let s = self.sin_k;
        let e2 = x * x + s * s;
        let e = e2.sqrt();
        let w = s / (2.0 * self.tau_q * e2);
        let rho = w / (4.0 * e);
        let rho_dot = 3.0 * s * x / (8.0 * self.tau_q * self.tau_q * e2 * e2 * e);
        (w, rho, rho_dot)
    }
}

fn drive_adiabatic(k: f64, protocol: &QuenchProtocol, tol: f64) -> Result<DrivenMode> {
    let mode = AdiabaticMode::new(k, protocol.tau_q);
    let t0 = protocol.t_start();
    let i = Complex64::new(0.0, 1.0);
    // State (a, β) with b = β + i a ρ e^{2iφ}.
    let rhs = |t: f64, y: &[Complex64; 2], dy: &mut [Complex64; 2]| {
        let (w, rho, rho_dot) = mode.couplings(t);
        let rot = Complex64::from_polar(1.0, 2.0 * mode.phase(t));
        let (a, beta) = (y[0], y[1]);
        dy[0] = beta * rot.conj() * w + i * a * (w * rho);
        dy[1] = -i * beta * (rho * w) + a * rot * Complex64::new(rho * rho * w, -rho_dot);
    };
    // Resolve the residual forcing oscillation unless it is too weak to
    // contribute more than `tol` over a step.
    let cap = |t: f64| {
        let (w, rho, rho_dot) = mode.couplings(t);
        let forcing = (rho * rho * w).hypot(rho_dot);
        (MAX_PHASE_STEP / (4.0 * mode.energy(t))).max(tol / forcing)
    };
    let solver = Dopri5::new(Tolerance::uniform(tol));
    // Starts in the instantaneous ground state with real, non-negative (v, u).
    let a0 = Complex64::from_polar(1.0, -mode.phase(t0));
    let beta0 = -i * a0 * mode.couplings(t0).1 * Complex64::from_polar(1.0, 2.0 * mode.phase(t0));
    let (y, stats) = solver.integrate(rhs, t0, 0.0, [a0, beta0], cap)?;
    let a = y[0];
    let b = y[1] + i * a * mode.couplings(0.0).1;
    let (ug, vg) = equilibrium_mode(k, 1.0);
    let v = a * vg + b * ug;
    let u = a * ug - b * vg;
    Ok(DrivenMode { v, u, norm_drift: norm_drift(v, u), stats })
}

/// Affine map of the ramp onto the canonical Landau-Zener problem
/// `i d/dt' (u, v)ᵀ = ½ [[t'/τ', 1], [1, −t'/τ']] (u, v)ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauZenerMap {
    pub k: f64,
    pub tau_q: f64,
    /// `τ_Q' = 4 τ_Q sin² k`.
    pub tau_q_prime: f64,
}

impl LandauZenerMap {
    /// `t' = 4 τ_Q sin k (g(t) − cos k)` for `t ≤ 0`.
    pub fn lz_time(&self, t: f64) -> f64 {
        let g = 1.0 - t / self.tau_q;
        4.0 * self.tau_q * self.k.sin() * (g - self.k.cos())
    }

    /// Slope `dt'/dt = −4 sin k`; the map runs backwards in `t'`.
    pub fn slope(&self) -> f64 {
        -4.0 * self.k.sin()
    }

    /// Excitation probability after a complete passage, `exp(−π τ_Q'/2)`.
    pub fn asymptotic_excitation(&self) -> f64 {
        (-core::f64::consts::FRAC_PI_2 * self.tau_q_prime).exp()
    }
}

pub fn landau_zener_map(k: f64, tau_q: f64) -> Result<LandauZenerMap> {
    if !(k > 0.0 && k < core::f64::consts::PI) {
        return Err(Error::InvalidArgument("momentum must lie in (0, π)"));
    }
    if !(tau_q > 0.0) {
        return Err(Error::InvalidArgument("quench time must be positive"));
    }
    let s = k.sin();
    Ok(LandauZenerMap { k, tau_q, tau_q_prime: 4.0 * tau_q * s * s })
}
