//! Mode-resolved dynamics of the one-dimensional transverse-field Ising chain
//! ramped linearly from the paramagnetic phase to its critical point `g = 1`
//! and then left to evolve freely there.
//!
//! After the Jordan-Wigner and Fourier transforms the positive-parity sector of
//! an `N`-spin ring splits into `N/2` independent two-level systems, one per
//! quasi-momentum `k = π/N, 3π/N, …, π − π/N`. The full many-body state is the
//! product of the per-mode Bogoliubov pairs `(v_k, u_k)` held in
//! [`ModeAmplitudes`]; every observable in this crate is a reduction over them.
//!
//! Pipeline:
//!
//! 1. [`driven_quench::drive_to_critical`] integrates the ramp `g(t) = 1 − t/τ_Q`.
//! 2. [`free_evolution::CriticalPropagator`] propagates the arrival state
//!    exactly in closed form for any `t ≥ 0`.
//! 3. [`observables`] reduces amplitudes to `p_k`, `p_GS`, `S^z(t)` and the
//!    Loschmidt echo.
//! 4. [`analysis`] extracts peaks and power-law fits from sampled series.
//!
//! [`approximations`] holds the closed-form small-momentum expressions that the
//! exact pipeline is compared against.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod approximations;
pub mod driven_quench;
pub mod error;
pub mod free_evolution;
pub mod lattice;
pub mod observables;
pub mod ode;
pub mod quadrature;
pub mod series;
mod sum;

pub use driven_quench::{ModeAmplitudes, QuenchProtocol};
pub use error::{Error, Result};
pub use free_evolution::{CriticalPropagator, Dispersion};
pub use lattice::{EquilibriumModes, KzScales, MomentumGrid};
pub use series::{ObservableId, SeriesMeta, TimeSeries};

pub use num_complex::Complex64;
