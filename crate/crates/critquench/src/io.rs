//! CSV and JSON formats.
//!
//! Series files start with `#`-prefixed `key=value` metadata lines followed by
//! a CSV table with header `t,value` (plus `logvalue` when the observable is
//! stored in log space and `power_one_over_n` on request). Floats are written
//! in shortest round-trip form, so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use critquench_core::analysis::{FitResult, Peak, Polarity};
use critquench_core::{ModeAmplitudes, ObservableId, SeriesMeta, TimeSeries};
use serde::{Deserialize, Serialize};

use crate::scan::ScanRow;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SeriesColumns {
    pub power_one_over_n: bool,
}

pub fn write_series<W: Write>(mut out: W, series: &TimeSeries, cols: SeriesColumns) -> Result<()> {
    let m = &series.meta;
    writeln!(out, "# observable={}", series.observable)?;
    writeln!(out, "# N={}", m.spins)?;
    writeln!(out, "# tau_Q={}", m.tau_q)?;
    writeln!(out, "# g_start={}", m.g_start)?;
    writeln!(out, "# dt={}", m.dt)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t", "value"];
    if series.log_values.is_some() {
        header.push("logvalue");
    }
    if cols.power_one_over_n {
        header.push("power_one_over_n");
    }
    w.write_record(&header)?;
    let power = cols.power_one_over_n.then(|| series.power_one_over_n());
    let mut record = Vec::with_capacity(header.len());
    for i in 0..series.len() {
        record.clear();
        record.push(series.t[i].to_string());
        record.push(series.values[i].to_string());
        if let Some(l) = &series.log_values {
            record.push(l[i].to_string());
        }
        if let Some(p) = &power {
            record.push(p[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series<R: BufRead>(mut input: R) -> Result<TimeSeries> {
    let mut observable = None;
    let mut meta = SeriesMeta { spins: 0, tau_q: 0.0, g_start: 0.0, dt: 0.0 };
    let header = loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::Config("series file has no header".into()));
        }
        let Some(kv) = line.strip_prefix('#') else {
            break line;
        };
        let (key, value) = kv.trim().split_once('=').ok_or_else(|| Error::Config(format!("bad metadata line {line:?}")))?;
        let bad = |_| Error::Config(format!("bad value for {key}: {value}"));
        match key {
            "observable" => observable = Some(parse_observable(value)?),
            "N" => meta.spins = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "tau_Q" => meta.tau_q = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            "g_start" => meta.g_start = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            "dt" => meta.dt = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            _ => {}
        }
    };
    let observable = observable.ok_or_else(|| Error::Config("series file lacks an observable".into()))?;
    let has_log = header.trim().split(',').any(|c| c == "logvalue");
    let rest = std::io::Read::chain(header.as_bytes(), input);
    let mut r = csv::Reader::from_reader(rest);
    let (mut t, mut values, mut logs) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad number in column {i}")))
        };
        t.push(num(0)?);
        values.push(num(1)?);
        if has_log {
            logs.push(num(2)?);
        }
    }
    Ok(TimeSeries::new(observable, meta, t, values, has_log.then_some(logs))?)
}

fn parse_observable(s: &str) -> Result<ObservableId> {
    use ObservableId::*;
    [Sz, LoschmidtEcho, LogLoschmidtEcho, SzSeries, SzTrain, EchoProduct, EchoRevivals, SzEd, LoschmidtEchoEd]
        .into_iter()
        .find(|o| o.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown observable {s:?}")))
}

/// `k,re_v,im_v,re_u,im_u` per mode.
pub fn write_modes<W: Write>(out: W, state: &ModeAmplitudes) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "re_v", "im_v", "re_u", "im_u"])?;
    for (j, k) in state.momenta().iter().enumerate() {
        let (v, u) = (state.v[j], state.u[j]);
        w.write_record([k, &v.re, &v.im, &u.re, &u.im].map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// `k,p_k,P_k` per mode.
pub fn write_quench<W: Write>(out: W, momenta: &[f64], p: &[f64], big_p: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "p_k", "P_k"])?;
    for ((k, p), q) in momenta.iter().zip(p).zip(big_p) {
        w.write_record([k, p, q].map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// `n,center,amplitude,fwhm,polarity,low_resolution` per detected peak.
pub fn write_peaks<W: Write>(out: W, peaks: &[Peak]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "center", "amplitude", "fwhm", "polarity", "low_resolution"])?;
    for p in peaks {
        let polarity = match p.polarity {
            Polarity::Min => "min",
            Polarity::Max => "max",
        };
        w.write_record([
            p.index.to_string(),
            p.center.to_string(),
            p.amplitude.to_string(),
            p.fwhm.to_string(),
            polarity.to_string(),
            p.low_resolution.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scalar report of a quench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchSummary {
    #[serde(rename = "N")]
    pub spins: usize,
    #[serde(rename = "tau_Q")]
    pub tau_q: f64,
    pub g_start: f64,
    pub approx: bool,
    pub p_gs: f64,
    pub log_p_gs: f64,
    pub p_gs_saturated: bool,
    /// `exp(−C N/√τ_Q)`.
    pub p_gs_integral_form: f64,
    pub sz0: f64,
    pub sz0_minus_2pi: f64,
    pub max_norm_drift: f64,
}

pub fn write_scan<W: Write>(out: W, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scan<R: std::io::Read>(input: R) -> Result<Vec<ScanRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub n_points: usize,
}

impl From<&FitResult> for FitJson {
    fn from(f: &FitResult) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            slope_se: f.slope_se,
            intercept_se: f.intercept_se,
            n_points: f.n_points,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}
