//! Exact propagation at the critical point.
//!
//! With `g = 1` the mode Hamiltonian is `ε_k [sin(k/2) σ_z − cos(k/2) σ_x]`,
//! `ε_k = 4 sin(k/2)`, and its propagator is
//!
//! ```text
//! [[cos εt − i sin(k/2) sin εt,   i cos(k/2) sin εt          ],
//!  [i cos(k/2) sin εt,            cos εt + i sin(k/2) sin εt ]]
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::driven_quench::ModeAmplitudes;
use crate::error::{Error, Result};
use crate::lattice::MomentumGrid;

/// Quasiparticle energy at the critical point, `4 sin(k/2)`.
pub fn dispersion(k: f64) -> f64 {
    4.0 * (0.5 * k).sin()
}

/// Which single-particle energy drives the phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    #[default]
    Exact,
    /// `ε_k ≈ 2k`; makes every observable exactly `N/2`-periodic.
    Linearized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPropagator {
    energy: Vec<f64>,
    cos_half: Vec<f64>,
    sin_half: Vec<f64>,
}

impl CriticalPropagator {
    pub fn new(grid: &MomentumGrid) -> Self {
        Self::with_dispersion(grid, Dispersion::Exact)
    }

    pub fn with_dispersion(grid: &MomentumGrid, dispersion_kind: Dispersion) -> Self {
        let k = grid.momenta();
        let energy = k
            .iter()
            .map(|&k| match dispersion_kind {
                Dispersion::Exact => dispersion(k),
                Dispersion::Linearized => 2.0 * k,
            })
            .collect();
        Self {
            energy,
            cos_half: k.iter().map(|&k| (0.5 * k).cos()).collect(),
            sin_half: k.iter().map(|&k| (0.5 * k).sin()).collect(),
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }

    /// Propagate mode `j` by time `t`.
    #[inline]
    pub fn propagate_mode(&self, j: usize, v: Complex64, u: Complex64, t: f64) -> (Complex64, Complex64) {
        let (sn, cs) = (self.energy[j] * t).sin_cos();
        let diag = Complex64::new(cs, -self.sin_half[j] * sn);
        let off = Complex64::new(0.0, self.cos_half[j] * sn);
        (diag * v + off * u, off * v + diag.conj() * u)
    }

    /// The state `t` after `state`'s time stamp.
    pub fn evolve(&self, state: &ModeAmplitudes, t: f64) -> Result<ModeAmplitudes> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument("evolution time must be finite and non-negative"));
        }
        if state.len() != self.len() {
            return Err(Error::InvalidArgument("propagator and state have different grids"));
        }
        let (v, u) = (0..self.len())
            .map(|j| self.propagate_mode(j, state.v[j], state.u[j], t))
            .unzip();
        ModeAmplitudes::new(state.grid().clone(), v, u, state.time + t)
    }
}

/// `⟨h̃_k⟩ = 2[(1 − cos k)(|v|² − |u|²) − 2 sin k Re(v* u)]`.
pub fn mode_energy(k: f64, v: Complex64, u: Complex64) -> f64 {
    2.0 * ((1.0 - k.cos()) * (v.norm_sqr() - u.norm_sqr()) - 2.0 * k.sin() * (v.conj() * u).re)
}

/// Energy of the critical-point Hamiltonian summed over modes.
pub fn critical_energy(state: &ModeAmplitudes) -> f64 {
    crate::sum::neumaier(
        state
            .momenta()
            .iter()
            .zip(state.v.iter().zip(&state.u))
            .map(|(&k, (&v, &u))| mode_energy(k, v, u)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn dispersion_values() {
        assert!((dispersion(PI) - 4.0).abs() < 1e-15);
        assert!((dispersion(PI / 3.0) - 2.0).abs() < 1e-15);
        for &k in &[1e-3, 1e-2, 0.1, 0.5] {
            let rel = (2.0 * k - dispersion(k)).abs() / (2.0 * k);
            assert!(rel < k * k / 24.0, "k = {k}: {rel}");
        }
    }

    fn sample_state() -> ModeAmplitudes {
        let grid = MomentumGrid::new(8).unwrap();
        let v = (0..4).map(|j| Complex64::from_polar(0.3 + 0.1 * j as f64, 0.7 * j as f64)).collect::<Vec<_>>();
        let u = v
            .iter()
            .enumerate()
            .map(|(j, v)| Complex64::from_polar((1.0 - v.norm_sqr()).sqrt(), -0.4 * j as f64))
            .collect();
        ModeAmplitudes::new(grid, v, u, 0.0).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let s = sample_state();
        let p = CriticalPropagator::new(s.grid());
        assert_eq!(p.evolve(&s, 0.0).unwrap().v, s.v);
    }

    #[test]
    fn half_period_flips_sign() {
        let s = sample_state();
        let p = CriticalPropagator::new(s.grid());
        for j in 0..p.len() {
            let t = PI / p.energies()[j];
            let (v, u) = p.propagate_mode(j, s.v[j], s.u[j], t);
            assert!((v + s.v[j]).norm() < 1e-14 && (u + s.u[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let s = sample_state();
        assert!(CriticalPropagator::new(s.grid()).evolve(&s, -1.0).is_err());
    }

    #[test]
    fn ground_state_is_stationary_up_to_phase() {
        let grid = MomentumGrid::new(12).unwrap();
        let s = ModeAmplitudes::equilibrium(&grid, 1.0, 0.0).unwrap();
        let p = CriticalPropagator::new(&grid);
        let e = p.evolve(&s, 3.7).unwrap();
        for j in 0..grid.len() {
            assert!((e.v[j].norm() - s.v[j].norm()).abs() < 1e-14);
        }
    }
}
