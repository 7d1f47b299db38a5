//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.
//!
//! The state is anything implementing [`OdeState`]; the crate uses it for the
//! two-component Bogoliubov pairs and the companion crate for full many-body
//! vectors. Error control is mixed absolute/relative on the RMS of the
//! component-wise scaled local error estimate, with a PI step controller.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, IntegrationFailure, Result};

pub trait OdeState: Clone {
    fn zeros_like(&self) -> Self;
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    /// Number of scalar (complex) components, used for RMS normalization.
    fn dim(&self) -> usize;
    /// Sum over components of `(|e_i| / (atol + rtol·max(|y0_i|, |y1_i|)))²`.
    fn scaled_sq_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
    fn is_finite(&self) -> bool;
}

impl<const D: usize> OdeState for [Complex64; D] {
    fn zeros_like(&self) -> Self {
        [Complex64::new(0.0, 0.0); D]
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, xi) in self.iter_mut().zip(x) {
            *s += xi * a;
        }
    }

    fn dim(&self) -> usize {
        D
    }

    fn scaled_sq_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        scaled_sq(err, y0, y1, atol, rtol)
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl OdeState for Vec<Complex64> {
    fn zeros_like(&self) -> Self {
        alloc::vec![Complex64::new(0.0, 0.0); self.len()]
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, xi) in self.iter_mut().zip(x) {
            *s += xi * a;
        }
    }

    fn dim(&self) -> usize {
        self.len()
    }

    fn scaled_sq_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        scaled_sq(err, y0, y1, atol, rtol)
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn scaled_sq(err: &[Complex64], y0: &[Complex64], y1: &[Complex64], atol: f64, rtol: f64) -> f64 {
    err.iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            let r = e.norm() / sc;
            r * r
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self { atol: tol, rtol: tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub tol: Tolerance,
    pub max_steps: usize,
    /// Upper bound on any single step.
    pub max_step: f64,
    /// Initial step; `None` selects one from the right-hand side.
    pub first_step: Option<f64>,
}

impl Dopri5 {
    pub fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            max_steps: 50_000_000,
            max_step: f64::INFINITY,
            first_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand & Prince (1980) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const BETA: f64 = 0.04;

impl Dopri5 {
    /// Integrate `y' = f(t, y)` from `t0` to `t1 > t0`.
    ///
    /// `step_cap(t)` bounds the step taken from `t` in addition to `max_step`;
    /// pass `|_| f64::INFINITY` when the right-hand side has no known
    /// oscillation scale.
    pub fn integrate<S, F, C>(
        &self,
        mut rhs: F,
        t0: f64,
        t1: f64,
        y0: S,
        step_cap: C,
    ) -> Result<(S, Stats)>
    where
        S: OdeState,
        F: FnMut(f64, &S, &mut S),
        C: Fn(f64) -> f64,
    {
        if !(t1 > t0) {
            if t1 == t0 {
                return Ok((y0, Stats::default()));
            }
            return Err(Error::InvalidArgument("integration interval must be forward in time"));
        }
        let tol = self.tol;
        let n = y0.dim().max(1) as f64;
        let mut stats = Stats::default();

        let mut y = y0;
        let mut k1 = y.zeros_like();
        let mut k2 = y.zeros_like();
        let mut k3 = y.zeros_like();
        let mut k4 = y.zeros_like();
        let mut k5 = y.zeros_like();
        let mut k6 = y.zeros_like();
        let mut k7 = y.zeros_like();
        let mut tmp;

        let mut t = t0;
        rhs(t, &y, &mut k1);
        stats.rhs_evals += 1;

        let mut h = match self.first_step {
            Some(h) => h,
            None => self.initial_step(&mut rhs, t, &y, &k1, t1 - t0, &mut stats),
        };
        let mut prev_err = 1e-4f64;

        while t < t1 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(fail(IntegrationFailure::TooManySteps { t }));
            }
            h = h.min(self.max_step).min(step_cap(t));
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(fail(IntegrationFailure::StepUnderflow { t, h }));
            }

            tmp = y.clone();
            tmp.axpy(h * A21, &k1);
            rhs(t + C2 * h, &tmp, &mut k2);

            tmp = y.clone();
            tmp.axpy(h * A31, &k1);
            tmp.axpy(h * A32, &k2);
            rhs(t + C3 * h, &tmp, &mut k3);

            tmp = y.clone();
            tmp.axpy(h * A41, &k1);
            tmp.axpy(h * A42, &k2);
            tmp.axpy(h * A43, &k3);
            rhs(t + C4 * h, &tmp, &mut k4);

            tmp = y.clone();
            tmp.axpy(h * A51, &k1);
            tmp.axpy(h * A52, &k2);
            tmp.axpy(h * A53, &k3);
            tmp.axpy(h * A54, &k4);
            rhs(t + C5 * h, &tmp, &mut k5);

            tmp = y.clone();
            tmp.axpy(h * A61, &k1);
            tmp.axpy(h * A62, &k2);
            tmp.axpy(h * A63, &k3);
            tmp.axpy(h * A64, &k4);
            tmp.axpy(h * A65, &k5);
            let t_new = if last { t1 } else { t + h };
            rhs(t_new, &tmp, &mut k6);

            let mut y_new = y.clone();
            y_new.axpy(h * B1, &k1);
            y_new.axpy(h * B3, &k3);
            y_new.axpy(h * B4, &k4);
            y_new.axpy(h * B5, &k5);
            y_new.axpy(h * B6, &k6);
            rhs(t_new, &y_new, &mut k7);
            stats.rhs_evals += 6;

            let mut err = k1.zeros_like();
            err.axpy(h * E1, &k1);
            err.axpy(h * E3, &k3);
            err.axpy(h * E4, &k4);
            err.axpy(h * E5, &k5);
            err.axpy(h * E6, &k6);
            err.axpy(h * E7, &k7);
            let err_norm = (S::scaled_sq_error(&err, &y, &y_new, tol.atol, tol.rtol) / n).sqrt();

            if !y_new.is_finite() || !err_norm.is_finite() {
                return Err(fail(IntegrationFailure::NonFinite { t }));
            }

            if err_norm <= 1.0 {
                stats.accepted += 1;
                let e = err_norm.max(1e-10);
                let fac = SAFETY * e.powf(-0.2 + 0.75 * BETA) * prev_err.powf(BETA);
                let fac = fac.clamp(MIN_FACTOR, MAX_FACTOR);
                prev_err = e;
                t = t_new;
                y = y_new;
                core::mem::swap(&mut k1, &mut k7);
                h *= fac;
            } else {
                stats.rejected += 1;
                let fac = (SAFETY * err_norm.powf(-0.2)).max(MIN_FACTOR);
                h *= fac;
            }
        }
        Ok((y, stats))
    }

    fn initial_step<S, F>(&self, rhs: &mut F, t: f64, y: &S, f0: &S, span: f64, stats: &mut Stats) -> f64
    where
        S: OdeState,
        F: FnMut(f64, &S, &mut S),
    {
        let tol = self.tol;
        let n = y.dim().max(1) as f64;
        let zero = y.zeros_like();
        let d0 = (S::scaled_sq_error(y, y, y, tol.atol, tol.rtol) / n).sqrt();
        let d1 = (S::scaled_sq_error(f0, y, y, tol.atol, tol.rtol) / n).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let mut y1 = y.clone();
        y1.axpy(h0, f0);
        let mut f1 = zero.clone();
        rhs(t + h0, &y1, &mut f1);
        stats.rhs_evals += 1;
        let mut df = f1;
        df.axpy(-1.0, f0);
        let d2 = (S::scaled_sq_error(&df, y, y, tol.atol, tol.rtol) / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

fn fail(reason: IntegrationFailure) -> Error {
    Error::Integration { k: None, reason }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn exponential_growth() {
        let solver = Dopri5::new(Tolerance::uniform(1e-12));
        let (y, _) = solver
            .integrate(
                |_, y: &[Complex64; 1], dy: &mut [Complex64; 1]| dy[0] = y[0],
                0.0,
                1.0,
                [Complex64::new(1.0, 0.0)],
                |_| f64::INFINITY,
            )
            .unwrap();
        assert!((y[0].re - core::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn rotation_conserves_norm() {
        // i y' = ω σ_x y: exact Rabi oscillation.
        let w = 3.0;
        let solver = Dopri5::new(Tolerance::uniform(1e-11));
        let i = Complex64::new(0.0, 1.0);
        let (y, stats) = solver
            .integrate(
                |_, y: &[Complex64; 2], dy: &mut [Complex64; 2]| {
                    dy[0] = -i * w * y[1];
                    dy[1] = -i * w * y[0];
                },
                0.0,
                2.0 * PI,
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                |_| f64::INFINITY,
            )
            .unwrap();
        let t = 2.0 * PI;
        assert!((y[0] - Complex64::new((w * t).cos(), 0.0)).norm() < 1e-9);
        assert!((y[1] - Complex64::new(0.0, -(w * t).sin())).norm() < 1e-9);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn backwards_interval_rejected() {
        let solver = Dopri5::new(Tolerance::uniform(1e-8));
        let r = solver.integrate(
            |_, _: &[Complex64; 1], _: &mut [Complex64; 1]| {},
            1.0,
            0.0,
            [Complex64::new(1.0, 0.0)],
            |_| f64::INFINITY,
        );
        assert!(r.is_err());
    }

    #[test]
    fn step_budget_reported() {
        let mut solver = Dopri5::new(Tolerance::uniform(1e-12));
        solver.max_steps = 3;
        let r = solver.integrate(
            |_, y: &[Complex64; 1], dy: &mut [Complex64; 1]| dy[0] = y[0] * Complex64::new(0.0, 50.0),
            0.0,
            10.0,
            [Complex64::new(1.0, 0.0)],
            |_| f64::INFINITY,
        );
        assert!(matches!(
            r,
            Err(Error::Integration { reason: IntegrationFailure::TooManySteps { .. }, .. })
        ));
    }
}
