//! Sampled observables.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableId {
    Sz,
    LoschmidtEcho,
    LogLoschmidtEcho,
    /// Leading-order magnetization series.
    SzSeries,
    /// Anti-periodic Gaussian peak train.
    SzTrain,
    /// Small-momentum product form of the echo.
    EchoProduct,
    /// Thermodynamic-limit Gaussian revivals of the echo.
    EchoRevivals,
    SzEd,
    LoschmidtEchoEd,
}

impl ObservableId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObservableId::Sz => "Sz",
            ObservableId::LoschmidtEcho => "LoschmidtEcho",
            ObservableId::LogLoschmidtEcho => "LogLoschmidtEcho",
            ObservableId::SzSeries => "SzSeries",
            ObservableId::SzTrain => "SzTrain",
            ObservableId::EchoProduct => "EchoProduct",
            ObservableId::EchoRevivals => "EchoRevivals",
            ObservableId::SzEd => "Sz_ed",
            ObservableId::LoschmidtEchoEd => "LoschmidtEcho_ed",
        }
    }

    /// Whether values carry a log-space companion column.
    pub fn has_log(&self) -> bool {
        matches!(
            self,
            ObservableId::LoschmidtEcho
                | ObservableId::LogLoschmidtEcho
                | ObservableId::EchoProduct
                | ObservableId::EchoRevivals
                | ObservableId::LoschmidtEchoEd
        )
    }
}

impl core::fmt::Display for ObservableId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesMeta {
    pub spins: usize,
    pub tau_q: f64,
    pub g_start: f64,
    pub dt: f64,
}

/// Default sampling step `min(1, √τ_Q / 20)`: at least twenty samples per
/// peak width.
pub fn default_dt(tau_q: f64) -> f64 {
    (tau_q.sqrt() / 20.0).min(1.0)
}

/// Uniform sample times `start, start + dt, …` up to and including `end`
/// (within rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument("sampling step must be positive"));
        }
        if !(start >= 0.0) || !(end > start) || !end.is_finite() {
            return Err(Error::InvalidArgument("time window must satisfy 0 ≤ start < end"));
        }
        Ok(Self { start, end, dt })
    }

    pub fn from_zero(t_max: f64, dt: f64) -> Result<Self> {
        Self::new(0.0, t_max, dt)
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub observable: ObservableId,
    pub meta: SeriesMeta,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Natural log of `values`, kept where the values can underflow.
    pub log_values: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(
        observable: ObservableId,
        meta: SeriesMeta,
        t: Vec<f64>,
        values: Vec<f64>,
        log_values: Option<Vec<f64>>,
    ) -> Result<Self> {
        if t.len() != values.len() || log_values.as_ref().is_some_and(|l| l.len() != t.len()) {
            return Err(Error::InvalidArgument("series columns differ in length"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("sample times must be strictly increasing"));
        }
        Ok(Self { observable, meta, t, values, log_values })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `L^{1/N}` from the log column (or the values if there is none).
    pub fn power_one_over_n(&self) -> Vec<f64> {
        let n = self.meta.spins as f64;
        match &self.log_values {
            Some(l) => l.iter().map(|x| (x / n).exp()).collect(),
            None => self.values.iter().map(|x| x.powf(1.0 / n)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.values.iter().copied())
    }
}
