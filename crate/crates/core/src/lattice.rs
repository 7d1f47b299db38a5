//! Momentum grid of the positive-parity sector, instantaneous ground-state
//! Bogoliubov modes and the Kibble-Zurek scales.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dynamical exponent of the chain.
pub const Z: f64 = 1.0;
/// Correlation-length exponent of the chain.
pub const NU: f64 = 1.0;
/// Smallest `N / √τ_Q` considered to be in the large-system regime.
pub const LARGE_SYSTEM_RATIO: f64 = 20.0;

/// The `N/2` quasi-momenta `k_j = (2j + 1)π/N` of an even ring with
/// anti-periodic fermion boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    spins: usize,
    momenta: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(spins: usize) -> Result<Self> {
        if spins < 4 {
            return Err(Error::InvalidArgument("system size must be at least 4"));
        }
        if spins % 2 != 0 {
            return Err(Error::InvalidArgument("system size must be even"));
        }
        let n = spins as f64;
        let momenta = (0..spins / 2)
            .map(|j| (2 * j + 1) as f64 * PI / n)
            .collect();
        Ok(Self { spins, momenta })
    }

    /// Number of spins `N`.
    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Number of modes, `N/2`.
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

/// Angle `θ_k ∈ (0, π)` of the instantaneous Bogoliubov rotation at field `g`.
pub fn bogoliubov_angle(k: f64, g: f64) -> f64 {
    k.sin().atan2(g - k.cos())
}

/// Ground-state pair `(u, v) = (cos θ/2, sin θ/2)` at field `g`.
pub fn equilibrium_mode(k: f64, g: f64) -> (f64, f64) {
    let half = 0.5 * bogoliubov_angle(k, g);
    (half.cos(), half.sin())
}

/// Ground-state pair `(u, v)` at the critical point, `u = sin(k/4 + π/4)`,
/// `v = cos(k/4 + π/4)`.
pub fn critical_mode(k: f64) -> (f64, f64) {
    let a = 0.25 * k + FRAC_PI_4;
    (a.sin(), a.cos())
}

/// Single-particle energy `2√(g² − 2g cos k + 1)`; the instantaneous gap of
/// mode `k` is twice this value.
pub fn quasiparticle_energy(k: f64, g: f64) -> f64 {
    2.0 * (g - k.cos()).hypot(k.sin())
}

/// Ground-state energy of the positive-parity sector, `−Σ_k 2√(g² − 2g cos k + 1)`.
pub fn ground_energy(grid: &MomentumGrid, g: f64) -> f64 {
    -crate::sum::neumaier(grid.momenta().iter().map(|&k| quasiparticle_energy(k, g)))
}

/// Instantaneous ground-state Bogoliubov modes on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumModes {
    pub g: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl EquilibriumModes {
    pub fn new(grid: &MomentumGrid, g: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidArgument("field must be finite and non-negative"));
        }
        let (u, v) = grid.momenta().iter().map(|&k| equilibrium_mode(k, g)).unzip();
        Ok(Self { g, u, v })
    }
}

/// Unit-prefactor Kibble-Zurek scales: `t̂ = ξ̂ = √τ_Q`, `τ_c = N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KzScales {
    pub tau_q: f64,
    pub t_hat: f64,
    pub xi_hat: f64,
    pub tau_c: f64,
    /// `N / ξ̂`; finite-size effects during the ramp are negligible when large.
    pub size_ratio: f64,
}

impl KzScales {
    pub fn new(spins: usize, tau_q: f64) -> Result<Self> {
        if !(tau_q > 0.0) || !tau_q.is_finite() {
            return Err(Error::InvalidArgument("quench time must be positive"));
        }
        let n = spins as f64;
        let t_hat = tau_q.powf(Z * NU / (1.0 + Z * NU));
        let xi_hat = tau_q.powf(NU / (1.0 + Z * NU));
        Ok(Self {
            tau_q,
            t_hat,
            xi_hat,
            tau_c: n.powf(Z),
            size_ratio: n / xi_hat,
        })
    }

    /// Whether `N ≫ √τ_Q` holds, judged against [`LARGE_SYSTEM_RATIO`].
    pub fn is_large_system(&self) -> bool {
        self.size_ratio >= LARGE_SYSTEM_RATIO
    }
}
