//! Observables reduced from mode amplitudes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::driven_quench::ModeAmplitudes;
use crate::error::Result;
use crate::free_evolution::CriticalPropagator;
use crate::lattice::critical_mode;
use crate::series::{ObservableId, SeriesMeta, TimeGrid, TimeSeries};
use crate::sum::Neumaier;

/// Smallest per-mode echo factor `1 − x_k` carried into the log sum.
const ECHO_FACTOR_FLOOR: f64 = 1e-300;

/// Probability `p_k = |v_c u_k − u_c v_k|²` that mode `k` is excited with
/// respect to the critical-point ground state.
///
/// Both per-mode probabilities are taken relative to the pair norm
/// `|u_k|² + |v_k|²`, so `p_k + P_k = 1` holds to rounding even when the
/// integrator has drifted.
pub fn excitation_probabilities(state: &ModeAmplitudes) -> Vec<f64> {
    state
        .momenta()
        .iter()
        .zip(state.v.iter().zip(&state.u))
        .map(|(&k, (&v, &u))| {
            let (uc, vc) = critical_mode(k);
            ((u * vc - v * uc).norm_sqr() / pair_norm(v, u)).clamp(0.0, 1.0)
        })
        .collect()
}

/// Probability `P_k = |v_c v_k* + u_c u_k*|²` of the critical-point ground state.
pub fn ground_probabilities(state: &ModeAmplitudes) -> Vec<f64> {
    state
        .momenta()
        .iter()
        .zip(state.v.iter().zip(&state.u))
        .map(|(&k, (&v, &u))| {
            let (uc, vc) = critical_mode(k);
            ((v.conj() * vc + u.conj() * uc).norm_sqr() / pair_norm(v, u)).clamp(0.0, 1.0)
        })
        .collect()
}

fn pair_norm(v: Complex64, u: Complex64) -> f64 {
    v.norm_sqr() + u.norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateProbability {
    pub value: f64,
    pub log_value: f64,
    /// Some mode is fully excited; the product vanishes exactly.
    pub saturated: bool,
}

/// `p_GS = Π_k (1 − p_k)`, accumulated as a sum of logarithms.
pub fn ground_state_probability(state: &ModeAmplitudes) -> GroundStateProbability {
    ground_state_probability_from(&excitation_probabilities(state))
}

pub fn ground_state_probability_from(p: &[f64]) -> GroundStateProbability {
    if p.iter().any(|&x| x >= 1.0) {
        return GroundStateProbability { value: 0.0, log_value: f64::NEG_INFINITY, saturated: true };
    }
    let mut acc = Neumaier::default();
    for &x in p {
        acc.add((-x).ln_1p());
    }
    let log_value = acc.total();
    GroundStateProbability { value: log_value.exp(), log_value, saturated: false }
}

/// `S^z = 1 − (4/N) Σ_k |v_k|²`.
pub fn transverse_magnetization(state: &ModeAmplitudes) -> f64 {
    let mut acc = Neumaier::default();
    for v in &state.v {
        acc.add(v.norm_sqr());
    }
    1.0 - 4.0 / state.spins() as f64 * acc.total()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoValue {
    pub value: f64,
    pub log_value: f64,
}

fn echo_log_factor(x: f64) -> f64 {
    let x = x.max(0.0);
    if x < 0.5 {
        (-x).ln_1p()
    } else {
        (1.0 - x).max(ECHO_FACTOR_FLOOR).ln()
    }
}

/// Joint evaluation of `S^z(t)` and the Loschmidt echo from one propagation of
/// the arrival state.
#[derive(Debug, Clone, Copy)]
pub struct Sampler<'a> {
    state0: &'a ModeAmplitudes,
    propagator: &'a CriticalPropagator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub sz: f64,
    pub echo: EchoValue,
}

impl<'a> Sampler<'a> {
    pub fn new(state0: &'a ModeAmplitudes, propagator: &'a CriticalPropagator) -> Self {
        assert_eq!(state0.len(), propagator.len(), "propagator and state have different grids");
        Self { state0, propagator }
    }

    pub fn spins(&self) -> usize {
        self.state0.spins()
    }

    pub fn sample(&self, t: f64) -> Sample {
        let s = self.state0;
        let mut occ = Neumaier::default();
        let mut log_echo = Neumaier::default();
        for j in 0..s.len() {
            let (v0, u0) = (s.v[j], s.u[j]);
            let (vt, ut) = self.propagator.propagate_mode(j, v0, u0, t);
            occ.add(vt.norm_sqr());
            log_echo.add(echo_log_factor((u0 * vt - v0 * ut).norm_sqr()));
        }
        let log_value = if t == 0.0 { 0.0 } else { log_echo.total() };
        Sample {
            sz: 1.0 - 4.0 / s.spins() as f64 * occ.total(),
            echo: EchoValue { value: log_value.exp(), log_value },
        }
    }

    pub fn sz(&self, t: f64) -> f64 {
        let s = self.state0;
        let mut occ = Neumaier::default();
        for j in 0..s.len() {
            let (vt, _) = self.propagator.propagate_mode(j, s.v[j], s.u[j], t);
            occ.add(vt.norm_sqr());
        }
        1.0 - 4.0 / s.spins() as f64 * occ.total()
    }

    pub fn echo(&self, t: f64) -> EchoValue {
        if t == 0.0 {
            return EchoValue { value: 1.0, log_value: 0.0 };
        }
        let s = self.state0;
        let mut acc = Neumaier::default();
        for j in 0..s.len() {
            let (v0, u0) = (s.v[j], s.u[j]);
            let (vt, ut) = self.propagator.propagate_mode(j, v0, u0, t);
            acc.add(echo_log_factor((u0 * vt - v0 * ut).norm_sqr()));
        }
        let log_value = acc.total();
        EchoValue { value: log_value.exp(), log_value }
    }
}

/// `L(t) = Π_k (1 − |u_k(0) v_k(t) − v_k(0) u_k(t)|²)`.
pub fn loschmidt_echo(state0: &ModeAmplitudes, propagator: &CriticalPropagator, t: f64) -> EchoValue {
    Sampler::new(state0, propagator).echo(t)
}

/// `S^z` sampled on `times`.
pub fn sz_series(
    state0: &ModeAmplitudes,
    propagator: &CriticalPropagator,
    times: &TimeGrid,
    meta: SeriesMeta,
) -> Result<TimeSeries> {
    let sampler = Sampler::new(state0, propagator);
    let t: Vec<f64> = times.times().collect();
    let values = t.iter().map(|&t| sampler.sz(t)).collect();
    TimeSeries::new(ObservableId::Sz, SeriesMeta { dt: times.dt, ..meta }, t, values, None)
}

/// Loschmidt echo sampled on `times`, with its logarithm.
pub fn echo_series(
    state0: &ModeAmplitudes,
    propagator: &CriticalPropagator,
    times: &TimeGrid,
    meta: SeriesMeta,
) -> Result<TimeSeries> {
    let sampler = Sampler::new(state0, propagator);
    let t: Vec<f64> = times.times().collect();
    let echoes: Vec<EchoValue> = t.iter().map(|&t| sampler.echo(t)).collect();
    TimeSeries::new(
        ObservableId::LoschmidtEcho,
        SeriesMeta { dt: times.dt, ..meta },
        t,
        echoes.iter().map(|e| e.value).collect(),
        Some(echoes.iter().map(|e| e.log_value).collect()),
    )
}

/// Adiabatic-impulse estimate `exp(−N (π − 2)/(4π) ĝ)` with `ĝ = α/√τ_Q`.
pub fn aia_ground_state_probability(spins: usize, tau_q: f64, alpha: f64) -> f64 {
    let g_hat = alpha / tau_q.sqrt();
    (-(spins as f64) * (PI - 2.0) / (4.0 * PI) * g_hat).exp()
}

/// Matching constant `α` for which the adiabatic-impulse estimate reproduces
/// `exp(−C N/√τ_Q)`.
pub fn aia_alpha_for(c: f64) -> f64 {
    c * 4.0 * PI / (PI - 2.0)
}

/// Per-mode overlap `u_k(0)* u_k(t) + v_k(0)* v_k(t)`; its modulus squared
/// equals `1 − x_k` for normalized pairs.
pub fn mode_overlap(v0: Complex64, u0: Complex64, vt: Complex64, ut: Complex64) -> Complex64 {
    u0.conj() * ut + v0.conj() * vt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MomentumGrid;

    #[test]
    fn ground_state_has_no_excitations() {
        let grid = MomentumGrid::new(50).unwrap();
        let s = ModeAmplitudes::equilibrium(&grid, 1.0, 0.0).unwrap();
        assert!(excitation_probabilities(&s).iter().all(|&p| p < 1e-30));
        assert!(ground_probabilities(&s).iter().all(|&p| (p - 1.0).abs() < 1e-15));
        let pgs = ground_state_probability(&s);
        assert!((pgs.value - 1.0).abs() < 1e-14 && !pgs.saturated);
    }

    #[test]
    fn polarized_state_magnetization() {
        let grid = MomentumGrid::new(10).unwrap();
        let s = ModeAmplitudes::equilibrium(&grid, 1e12, 0.0).unwrap();
        assert!((transverse_magnetization(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn critical_equilibrium_magnetization() {
        let grid = MomentumGrid::new(1000).unwrap();
        let s = ModeAmplitudes::equilibrium(&grid, 1.0, 0.0).unwrap();
        let sz = transverse_magnetization(&s);
        assert!((sz - 2.0 / PI).abs() < 2e-3);
        // closed form 1/(N sin(π/2N))
        assert!((sz - 1.0 / (1000.0 * (PI / 2000.0).sin())).abs() < 1e-13);
    }

    #[test]
    fn saturated_mode_flags_zero() {
        let g = ground_state_probability_from(&[0.1, 1.0]);
        assert!(g.saturated && g.value == 0.0);
    }

    #[test]
    fn aia_examples() {
        assert_eq!(aia_ground_state_probability(0, 100.0, 0.4), 1.0);
        let alpha = aia_alpha_for(0.034);
        assert!((alpha - 0.37426).abs() < 1e-5, "{alpha}");
        let a = aia_ground_state_probability(100, 100.0, alpha).ln();
        let b = aia_ground_state_probability(200, 100.0, alpha).ln();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn echo_starts_at_one() {
        let grid = MomentumGrid::new(20).unwrap();
        let s = ModeAmplitudes::equilibrium(&grid, 2.0, 0.0).unwrap();
        let p = CriticalPropagator::new(&grid);
        let e = loschmidt_echo(&s, &p, 0.0);
        assert_eq!(e.value, 1.0);
        assert!(loschmidt_echo(&s, &p, 3.0).value < 1.0);
    }
}
