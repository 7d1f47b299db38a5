//! Rayon-parallel versions of the per-mode and per-sample loops. Work is split
//! over independent items and collected in input order, so results do not
//! depend on the thread count.

use critquench_core::driven_quench::{assemble, drive_mode, DriveOptions};
use critquench_core::observables::{EchoValue, Sampler};
use critquench_core::series::TimeGrid;
use critquench_core::{CriticalPropagator, ModeAmplitudes, MomentumGrid, ObservableId, QuenchProtocol, SeriesMeta, TimeSeries};
use rayon::prelude::*;

use crate::Result;

pub fn drive_to_critical(protocol: &QuenchProtocol, grid: &MomentumGrid, opts: &DriveOptions) -> Result<ModeAmplitudes> {
    let modes = grid
        .momenta()
        .par_iter()
        .map(|&k| drive_mode(k, protocol, opts))
        .collect::<critquench_core::Result<Vec<_>>>()?;
    Ok(assemble(grid, &modes))
}

pub fn sz_series(
    state0: &ModeAmplitudes,
    propagator: &CriticalPropagator,
    times: &TimeGrid,
    meta: SeriesMeta,
) -> Result<TimeSeries> {
    let sampler = Sampler::new(state0, propagator);
    let t: Vec<f64> = times.times().collect();
    let values = t.par_iter().map(|&t| sampler.sz(t)).collect();
    Ok(TimeSeries::new(ObservableId::Sz, SeriesMeta { dt: times.dt, ..meta }, t, values, None)?)
}

pub fn echo_series(
    state0: &ModeAmplitudes,
    propagator: &CriticalPropagator,
    times: &TimeGrid,
    meta: SeriesMeta,
) -> Result<TimeSeries> {
    let sampler = Sampler::new(state0, propagator);
    let t: Vec<f64> = times.times().collect();
    let echoes: Vec<EchoValue> = t.par_iter().map(|&t| sampler.echo(t)).collect();
    Ok(TimeSeries::new(
        ObservableId::LoschmidtEcho,
        SeriesMeta { dt: times.dt, ..meta },
        t,
        echoes.iter().map(|e| e.value).collect(),
        Some(echoes.iter().map(|e| e.log_value).collect()),
    )?)
}
