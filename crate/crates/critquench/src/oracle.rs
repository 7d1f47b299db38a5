//! Brute-force check of the fermionic pipeline on small rings.
//!
//! The spin Hamiltonian `H(g) = −Σ_i (σ^x_i σ^x_{i+1} + g σ^z_i)` with periodic
//! boundary is built on the `σ^z` product basis, ramped with the same protocol
//! as the fermions and then evolved at `g = 1`. Basis state `b` has spin `i`
//! down (`σ^z_i = −1`) when bit `i` of `b` is set.
//!
//! Everything runs in the positive-parity sector (even number of down spins)
//! unless a full basis is requested explicitly.

use critquench_core::driven_quench::{DriveOptions, Frame};
use critquench_core::lattice::ground_energy;
use critquench_core::observables::{ground_state_probability, Sampler};
use critquench_core::ode::{Dopri5, Tolerance};
use critquench_core::series::TimeGrid;
use critquench_core::{CriticalPropagator, ModeAmplitudes, MomentumGrid, ObservableId, QuenchProtocol, SeriesMeta, TimeSeries};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::{parallel, Error, Result};

pub const MIN_SPINS: usize = 4;
pub const MAX_SPINS: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_DT: f64 = 0.05;
/// Agreement required between the two pipelines.
pub const AGREEMENT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Full,
    EvenParity,
}

/// Sparse structure of the ring Hamiltonian on a chosen basis. The bond term
/// has unit off-diagonal entries at `flips`; the field term is diagonal.
#[derive(Debug, Clone)]
pub struct SpinRing {
    spins: usize,
    states: Vec<u32>,
    /// `flips[r * N + i]`: row of the state reached from row `r` by flipping
    /// spins `i` and `i + 1`.
    flips: Vec<u32>,
    /// `Σ_i σ^z_i` per row.
    sz_total: Vec<f64>,
}

impl SpinRing {
    pub fn new(spins: usize, basis: Basis) -> Result<Self> {
        if !(MIN_SPINS..=MAX_SPINS).contains(&spins) || spins % 2 != 0 {
            return Err(Error::Config(format!(
                "exact diagonalization needs an even N in [{MIN_SPINS}, {MAX_SPINS}], got {spins}"
            )));
        }
        let states: Vec<u32> = (0..1u32 << spins)
            .filter(|b| basis == Basis::Full || b.count_ones() % 2 == 0)
            .collect();
        let mut index = vec![u32::MAX; 1 << spins];
        for (r, &b) in states.iter().enumerate() {
            index[b as usize] = r as u32;
        }
        let mut flips = Vec::with_capacity(states.len() * spins);
        for &b in &states {
            for i in 0..spins {
                let mask = (1u32 << i) | (1u32 << ((i + 1) % spins));
                flips.push(index[(b ^ mask) as usize]);
            }
        }
        let sz_total = states.iter().map(|b| spins as f64 - 2.0 * b.count_ones() as f64).collect();
        Ok(Self { spins, states, flips, sz_total })
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    /// `y = (H(g) + shift) x`.
    pub fn apply(&self, g: f64, shift: f64, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.spins;
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = x[r] * (shift - g * self.sz_total[r]);
            for &c in &self.flips[r * n..(r + 1) * n] {
                acc -= x[c as usize];
            }
            *out = acc;
        }
    }

    pub fn dense(&self, g: f64) -> DMatrix<f64> {
        let n = self.spins;
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for r in 0..self.dim() {
            h[(r, r)] = -g * self.sz_total[r];
            for &c in &self.flips[r * n..(r + 1) * n] {
                h[(r, c as usize)] -= 1.0;
            }
        }
        h
    }

    /// Eigen-decomposition of `H(g)` with eigenvalues in ascending order.
    pub fn spectrum(&self, g: f64) -> Spectrum {
        let eig = SymmetricEigen::new(self.dense(g));
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(self.dim(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = eig.eigenvectors.select_columns(&order);
        Spectrum { values, vectors }
    }

    /// Lowest state of `H(g)` restricted to positive parity.
    pub fn ground_state(&self, g: f64) -> (f64, Vec<Complex64>) {
        let spec = self.spectrum(g);
        let j = (0..self.dim())
            .find(|&j| self.parity_of_column(&spec.vectors, j) > 0.5)
            .expect("positive-parity sector is never empty");
        let psi = spec.vectors.column(j).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        (spec.values[j], psi)
    }

    fn parity_of_column(&self, m: &DMatrix<f64>, j: usize) -> f64 {
        m.column(j).iter().zip(&self.states).map(|(x, b)| parity_sign(*b) * x * x).sum()
    }

    /// Site-averaged `⟨σ^z⟩`.
    pub fn magnetization(&self, psi: &[Complex64]) -> f64 {
        let sum: f64 = psi.iter().zip(&self.sz_total).map(|(a, s)| a.norm_sqr() * s).sum();
        sum / self.spins as f64
    }

    /// `⟨Π_i σ^z_i⟩`.
    pub fn parity(&self, psi: &[Complex64]) -> f64 {
        psi.iter().zip(&self.states).map(|(a, b)| parity_sign(*b) * a.norm_sqr()).sum()
    }

    /// Evolve `psi` under `H(g(t))` from `t0` to `t1` with the adaptive
    /// integrator.
    pub fn ramp(
        &self,
        protocol: &QuenchProtocol,
        t0: f64,
        t1: f64,
        psi: Vec<Complex64>,
        tol: f64,
    ) -> Result<Vec<Complex64>> {
        let minus_i = Complex64::new(0.0, -1.0);
        let n = self.spins as f64;
        let rhs = |t: f64, y: &Vec<Complex64>, dy: &mut Vec<Complex64>| {
            let g = protocol.field(t);
            // The shift N g only changes the global phase and keeps the
            // diagonal small.
            self.apply(g, n * g, y, dy);
            for d in dy.iter_mut() {
                *d *= minus_i;
            }
        };
        let solver = Dopri5::new(Tolerance::uniform(tol));
        let (psi, _) = solver.integrate(rhs, t0, t1, psi, |_| f64::INFINITY)?;
        Ok(psi)
    }
}

fn parity_sign(b: u32) -> f64 {
    if b.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: DMatrix<f64>,
}

/// Full `2^N` ring Hamiltonian `H(g)`.
pub fn build_hamiltonian(spins: usize, g: f64) -> Result<(SpinRing, DMatrix<f64>)> {
    let ring = SpinRing::new(spins, Basis::Full)?;
    let h = ring.dense(g);
    Ok((ring, h))
}

/// Positive-parity ground energy from exact diagonalization.
pub fn ed_ground_energy(spins: usize, g: f64) -> Result<f64> {
    Ok(SpinRing::new(spins, Basis::EvenParity)?.ground_state(g).0)
}

/// Exact free evolution at `g = 1` of the arrival state, by spectral
/// decomposition.
#[derive(Debug, Clone)]
pub struct CriticalEvolution {
    ring: SpinRing,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    /// Arrival state in the eigenbasis.
    coeffs: Vec<Complex64>,
}

impl CriticalEvolution {
    pub fn new(ring: SpinRing, psi0: &[Complex64]) -> Self {
        let spec = ring.spectrum(1.0);
        let coeffs = (0..ring.dim())
            .map(|j| spec.vectors.column(j).iter().zip(psi0).map(|(&e, &a)| a * e).sum())
            .collect();
        Self { ring, energies: spec.values.iter().copied().collect(), vectors: spec.vectors, coeffs }
    }

    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let phased: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(&self.energies)
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        (0..self.ring.dim())
            .map(|r| self.vectors.row(r).iter().zip(&phased).map(|(&x, &c)| c * x).sum())
            .collect()
    }

    pub fn magnetization(&self, t: f64) -> f64 {
        self.ring.magnetization(&self.state(t))
    }

    /// `|⟨ψ(0)|ψ(t)⟩|²`.
    pub fn echo(&self, t: f64) -> f64 {
        let amp: Complex64 = self
            .coeffs
            .iter()
            .zip(&self.energies)
            .map(|(c, e)| Complex64::from_polar(c.norm_sqr(), -e * t))
            .sum();
        amp.norm_sqr()
    }
}

/// Result of an exact-diagonalization run through the quench protocol.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub sz: TimeSeries,
    pub echo: TimeSeries,
    /// Overlap squared of the arrival state with the critical ground state.
    pub p_gs: f64,
    /// Largest `|⟨Π σ^z⟩ − 1|` seen at arrival and on the sample times.
    pub parity_error: f64,
    pub norm_error: f64,
}

/// Drive the spin ring from its ground state at `g_start` to `g = 1`, then
/// sample `S^z` and the echo on `times`.
pub fn oracle_run(spins: usize, protocol: &QuenchProtocol, times: &TimeGrid, tol: f64) -> Result<OracleRun> {
    let ring = SpinRing::new(spins, Basis::EvenParity)?;
    let (_, psi_start) = ring.ground_state(protocol.g_start());
    let mut psi0 = ring.ramp(protocol, protocol.t_start(), 0.0, psi_start, tol)?;
    let norm = psi0.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let norm_error = (norm - 1.0).abs();
    // Drift is reported, then removed so that L(0) = 1.
    let scale = norm.sqrt().recip();
    psi0.iter_mut().for_each(|a| *a *= scale);
    let (_, critical) = ring.ground_state(1.0);
    let overlap: Complex64 = critical.iter().zip(&psi0).map(|(g, a)| g.conj() * a).sum();
    let mut parity_error = (ring.parity(&psi0) - 1.0).abs();

    let evolution = CriticalEvolution::new(ring, &psi0);
    let t: Vec<f64> = times.times().collect();
    let mut sz = Vec::with_capacity(t.len());
    let mut echo = Vec::with_capacity(t.len());
    for &ti in &t {
        let psi = evolution.state(ti);
        sz.push(evolution.ring.magnetization(&psi));
        parity_error = parity_error.max((evolution.ring.parity(&psi) - 1.0).abs());
        echo.push(evolution.echo(ti));
    }
    let meta = SeriesMeta { spins, tau_q: protocol.tau_q(), g_start: protocol.g_start(), dt: times.dt };
    let log_echo = echo.iter().map(|x| x.ln()).collect();
    Ok(OracleRun {
        sz: TimeSeries::new(ObservableId::SzEd, meta, t.clone(), sz, None)?,
        echo: TimeSeries::new(ObservableId::LoschmidtEchoEd, meta, t, echo, Some(log_echo))?,
        p_gs: overlap.norm_sqr(),
        parity_error,
        norm_error,
    })
}

/// Side-by-side comparison of the two pipelines on one `(N, τ_Q)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub spins: usize,
    #[serde(rename = "tau_Q")]
    pub tau_q: f64,
    pub g_start: f64,
    pub t_max: f64,
    pub max_abs_dsz: f64,
    pub max_abs_decho: f64,
    pub p_gs_ed: f64,
    pub p_gs_fermion: f64,
    pub ground_energy_ed: f64,
    pub ground_energy_fermion: f64,
    pub parity_error: f64,
    pub pass: bool,
}

pub fn compare(spins: usize, protocol: &QuenchProtocol, t_max: f64, dt: f64, tol: f64) -> Result<(OracleReport, OracleRun)> {
    let times = TimeGrid::from_zero(t_max, dt)?;
    let ed = oracle_run(spins, protocol, &times, tol)?;

    let grid = MomentumGrid::new(spins)?;
    let opts = DriveOptions { tol, frame: Frame::Adiabatic };
    let state0 = parallel::drive_to_critical(protocol, &grid, &opts)?;
    let (max_abs_dsz, max_abs_decho) = fermion_deviation(&state0, &ed);

    let ground_energy_ed = ed_ground_energy(spins, 1.0)?;
    let ground_energy_fermion = ground_energy(&grid, 1.0);
    let p_gs_fermion = ground_state_probability(&state0).value;
    let pass = max_abs_dsz < AGREEMENT
        && max_abs_decho < AGREEMENT
        && (ground_energy_ed - ground_energy_fermion).abs() < 1e-10;
    let report = OracleReport {
        spins,
        tau_q: protocol.tau_q(),
        g_start: protocol.g_start(),
        t_max,
        max_abs_dsz,
        max_abs_decho,
        p_gs_ed: ed.p_gs,
        p_gs_fermion,
        ground_energy_ed,
        ground_energy_fermion,
        parity_error: ed.parity_error,
        pass,
    };
    Ok((report, ed))
}

/// Largest deviations of the fermionic `S^z` and echo from an oracle run on
/// the same sample times.
pub fn fermion_deviation(state0: &ModeAmplitudes, ed: &OracleRun) -> (f64, f64) {
    let propagator = CriticalPropagator::new(state0.grid());
    let sampler = Sampler::new(state0, &propagator);
    ed.sz.t.iter().enumerate().fold((0.0f64, 0.0f64), |(ds, de), (i, &t)| {
        let s = sampler.sample(t);
        (ds.max((s.sz - ed.sz.values[i]).abs()), de.max((s.echo.value - ed.echo.values[i]).abs()))
    })
}

/// Bogoliubov ground energy on the positive-parity grid, for cross-checks.
pub fn fermion_ground_energy(spins: usize, g: f64) -> Result<f64> {
    Ok(ground_energy(&MomentumGrid::new(spins)?, g))
}
