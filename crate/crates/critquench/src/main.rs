use std::f64::consts::FRAC_2_PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critquench::config::RunConfig;
use critquench::io::{self, FitJson, QuenchSummary, SeriesColumns};
use critquench::oracle;
use critquench::parallel;
use critquench::scan::{self, ScanObservable, ScanSettings, Vary};
use critquench::{Error, Result};
use critquench_core::analysis::{find_peaks, PeakOptions};
use critquench_core::approximations::{
    approx_amplitudes, approx_excitation_probabilities, constant_c, echo_gaussian_revivals_log, echo_product_approx,
    pgs_approx, sz_gaussian_train, sz_leading_series,
};
use critquench_core::driven_quench::DriveOptions;
use critquench_core::observables::{
    excitation_probabilities, ground_probabilities, ground_state_probability, ground_state_probability_from,
    transverse_magnetization,
};
use critquench_core::series::{default_dt, TimeGrid};
use critquench_core::{
    CriticalPropagator, Dispersion, ModeAmplitudes, MomentumGrid, ObservableId, QuenchProtocol, SeriesMeta, TimeSeries,
};

const DEFAULT_SPINS: usize = 2000;
const DEFAULT_TAU_Q: f64 = 100.0;
const DEFAULT_ORACLE_SPINS: usize = 6;
const DEFAULT_ORACLE_TAU_Q: f64 = 10.0;
const DEFAULT_SCAN_TAUS: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];
const DEFAULT_SCAN_SIZES: [usize; 5] = [1000, 1400, 2000, 2800, 4000];

/// Transverse-field Ising chain driven to its critical point.
#[derive(Parser, Debug)]
#[command(name = "critquench", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of spins (even).
    #[arg(long = "n", global = true)]
    spins: Option<usize>,
    /// Quench time.
    #[arg(long = "tauq", global = true)]
    tau_q: Option<f64>,
    /// Ramp start field.
    #[arg(long = "gstart", global = true)]
    g_start: Option<f64>,
    /// Integrator tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sampling step of time series.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long = "tmax", global = true)]
    t_max: Option<f64>,
    /// Samples before this time are ignored by the peak detector.
    #[arg(long = "tmin-peaks", global = true)]
    t_min_peaks: Option<f64>,
    /// Output directory.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Drive to the critical point; write p_k, P_k and scalar observables.
    Quench {
        /// Use the closed-form small-momentum amplitudes instead of integrating.
        #[arg(long)]
        approx: bool,
        /// Also write the complex amplitudes at the critical point.
        #[arg(long)]
        dump_modes: bool,
    },
    /// Drive, then sample observables during the free evolution.
    Evolve {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "sz")]
        obs: Vec<EvolveObs>,
        /// Add an `L^{1/N}` column to echo series.
        #[arg(long)]
        power_one_over_n: bool,
        /// Replace the dispersion by its small-momentum form `2k`.
        #[arg(long)]
        linearized_dispersion: bool,
    },
    /// Scan quench time or system size and fit a power law.
    Scan {
        #[arg(long, value_enum)]
        vary: VaryArg,
        #[arg(long, value_enum)]
        obs: ScanObs,
        /// Quench times of a τ_Q scan.
        #[arg(long, value_delimiter = ',')]
        taus: Vec<f64>,
        /// System sizes of an N scan.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Compare against exact diagonalization of the spin ring (N <= 10).
    Oracle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EvolveObs {
    Sz,
    Echo,
    SzSeries,
    SzTrain,
    EchoProduct,
    EchoRevivals,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum VaryArg {
    Tauq,
    N,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ScanObs {
    Pgs,
    Sz0,
    PeakAmplitude,
    PeakWidth,
    EchoWidth,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    std::fs::create_dir_all(&cfg.output)?;
    match cli.command {
        Command::Quench { approx, dump_modes } => cmd_quench(&cfg, approx, dump_modes),
        Command::Evolve { obs, power_one_over_n, linearized_dispersion } => {
            cmd_evolve(&cfg, &obs, power_one_over_n, linearized_dispersion)
        }
        Command::Scan { vary, obs, .. } => cmd_scan(&cfg, vary, obs),
        Command::Oracle => cmd_oracle(&cfg),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    }
    .with_env();
    cfg.spins = c.spins.or(cfg.spins);
    cfg.tau_q = c.tau_q.or(cfg.tau_q);
    cfg.g_start = c.g_start.unwrap_or(cfg.g_start);
    cfg.tol = c.tol.unwrap_or(cfg.tol);
    cfg.dt = c.dt.or(cfg.dt);
    cfg.t_max = c.t_max.or(cfg.t_max);
    cfg.t_min_peaks = c.t_min_peaks.or(cfg.t_min_peaks);
    cfg.threads = c.threads.or(cfg.threads);
    if let Some(out) = &c.output {
        cfg.output = out.clone();
    }
    if let Command::Scan { taus, sizes, .. } = &cli.command {
        if !taus.is_empty() {
            cfg.taus = taus.clone();
        }
        if !sizes.is_empty() {
            cfg.sizes = sizes.clone();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Cell {
    spins: usize,
    protocol: QuenchProtocol,
    dt: f64,
}

impl Cell {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let spins = cfg.spins.unwrap_or(DEFAULT_SPINS);
        let tau_q = cfg.tau_q.unwrap_or(DEFAULT_TAU_Q);
        Ok(Self { spins, protocol: QuenchProtocol::new(tau_q, cfg.g_start)?, dt: cfg.dt.unwrap_or(default_dt(tau_q)) })
    }

    fn meta(&self) -> SeriesMeta {
        SeriesMeta { spins: self.spins, tau_q: self.protocol.tau_q(), g_start: self.protocol.g_start(), dt: self.dt }
    }

    fn drive(&self, cfg: &RunConfig) -> Result<(MomentumGrid, ModeAmplitudes)> {
        let grid = MomentumGrid::new(self.spins)?;
        let state = parallel::drive_to_critical(&self.protocol, &grid, &DriveOptions::with_tol(cfg.tol))?;
        Ok((grid, state))
    }
}

fn cmd_quench(cfg: &RunConfig, approx: bool, dump_modes: bool) -> Result<()> {
    let cell = Cell::new(cfg)?;
    let tau_q = cell.protocol.tau_q();
    let (state, p) = if approx {
        let grid = MomentumGrid::new(cell.spins)?;
        let approx_state = approx_amplitudes(&grid, tau_q)?;
        if !approx_state.is_reliable() {
            eprintln!("warning: the small-momentum expansion is unreliable for tau_Q = {tau_q}");
        }
        let p = approx_excitation_probabilities(&grid, tau_q);
        (approx_state.state, p)
    } else {
        let (_, state) = cell.drive(cfg)?;
        let p = excitation_probabilities(&state);
        (state, p)
    };
    let big_p = if approx { p.iter().map(|p| 1.0 - p).collect() } else { ground_probabilities(&state) };
    let pgs = if approx { ground_state_probability_from(&p) } else { ground_state_probability(&state) };
    let sz0 = transverse_magnetization(&state);
    let summary = QuenchSummary {
        spins: cell.spins,
        tau_q,
        g_start: cell.protocol.g_start(),
        approx,
        p_gs: pgs.value,
        log_p_gs: pgs.log_value,
        p_gs_saturated: pgs.saturated,
        p_gs_integral_form: pgs_approx(cell.spins, tau_q, constant_c()?),
        sz0,
        sz0_minus_2pi: sz0 - FRAC_2_PI,
        max_norm_drift: if approx { 0.0 } else { state.max_norm_drift() },
    };
    io::write_quench(io::create(&cfg.output.join("quench.csv"))?, state.momenta(), &p, &big_p)?;
    io::write_json(&cfg.output.join("quench.json"), &summary)?;
    if dump_modes {
        io::write_modes(io::create(&cfg.output.join("modes.csv"))?, &state)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_evolve(cfg: &RunConfig, obs: &[EvolveObs], power_one_over_n: bool, linearized: bool) -> Result<()> {
    let cell = Cell::new(cfg)?;
    let meta = cell.meta();
    let tau_q = cell.protocol.tau_q();
    let t_max = cfg.t_max.unwrap_or(cell.spins as f64);
    let times = TimeGrid::from_zero(t_max, cell.dt)?;
    let kind = if linearized { Dispersion::Linearized } else { Dispersion::Exact };
    let grid = MomentumGrid::new(cell.spins)?;
    let needs_drive = obs.iter().any(|o| matches!(o, EvolveObs::Sz | EvolveObs::Echo));
    let state0 = if needs_drive { Some(cell.drive(cfg)?.1) } else { None };
    let propagator = CriticalPropagator::with_dispersion(&grid, kind);
    let t: Vec<f64> = times.times().collect();
    let cols = SeriesColumns { power_one_over_n };
    let mut seen = Vec::new();

    for &o in obs {
        if seen.contains(&o) {
            continue;
        }
        seen.push(o);
        let series = match o {
            EvolveObs::Sz => parallel::sz_series(state0.as_ref().unwrap(), &propagator, &times, meta)?,
            EvolveObs::Echo => parallel::echo_series(state0.as_ref().unwrap(), &propagator, &times, meta)?,
            EvolveObs::SzSeries => {
                let v = t.iter().map(|&t| sz_leading_series(&grid, tau_q, t)).collect();
                TimeSeries::new(ObservableId::SzSeries, meta, t.clone(), v, None)?
            }
            EvolveObs::SzTrain => {
                let v = t.iter().map(|&t| sz_gaussian_train(cell.spins, tau_q, t)).collect();
                TimeSeries::new(ObservableId::SzTrain, meta, t.clone(), v, None)?
            }
            EvolveObs::EchoProduct => {
                let l: Vec<f64> = t.iter().map(|&t| echo_product_approx(&grid, tau_q, t, kind)).collect();
                log_series(ObservableId::EchoProduct, meta, &t, l)?
            }
            EvolveObs::EchoRevivals => {
                let l: Vec<f64> = t.iter().map(|&t| echo_gaussian_revivals_log(cell.spins, tau_q, t)).collect();
                log_series(ObservableId::EchoRevivals, meta, &t, l)?
            }
        };
        let name = series.observable.as_str();
        io::write_series(io::create(&cfg.output.join(format!("{name}.csv")))?, &series, cols)?;
        let peak_opts = match o {
            EvolveObs::Sz => Some(PeakOptions::magnetization(cell.spins)),
            EvolveObs::Echo => Some(PeakOptions::echo(cell.spins)),
            _ => None,
        };
        if let Some(mut opts) = peak_opts {
            if let Some(t_min) = cfg.t_min_peaks {
                opts.t_min = t_min;
            }
            let report = find_peaks(&series, &opts);
            for w in &report.warnings {
                eprintln!("warning: {name}: {w:?}");
            }
            io::write_peaks(io::create(&cfg.output.join(format!("{name}_peaks.csv")))?, &report.peaks)?;
            println!("{name}: {} samples, {} peaks", series.len(), report.peaks.len());
        } else {
            println!("{name}: {} samples", series.len());
        }
    }
    Ok(())
}

fn log_series(id: ObservableId, meta: SeriesMeta, t: &[f64], log: Vec<f64>) -> Result<TimeSeries> {
    let values = log.iter().map(|l| l.exp()).collect();
    Ok(TimeSeries::new(id, meta, t.to_vec(), values, Some(log))?)
}

fn cmd_scan(cfg: &RunConfig, vary: VaryArg, obs: ScanObs) -> Result<()> {
    let settings = ScanSettings { g_start: cfg.g_start, tol: cfg.tol, dt: cfg.dt };
    let (vary, table, tag) = match vary {
        VaryArg::Tauq => {
            let spins = cfg.spins.unwrap_or(DEFAULT_SPINS);
            let taus = if cfg.taus.is_empty() { DEFAULT_SCAN_TAUS.to_vec() } else { cfg.taus.clone() };
            (Vary::TauQ, scan::scan_tau_q(spins, &taus, &settings)?, "tauq")
        }
        VaryArg::N => {
            let tau_q = cfg.tau_q.unwrap_or(DEFAULT_TAU_Q);
            let sizes = if cfg.sizes.is_empty() { DEFAULT_SCAN_SIZES.to_vec() } else { cfg.sizes.clone() };
            (Vary::Spins, scan::scan_system_size(tau_q, &sizes, &settings)?, "n")
        }
    };
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let (obs, obs_tag) = match obs {
        ScanObs::Pgs => (ScanObservable::Pgs, "pgs"),
        ScanObs::Sz0 => (ScanObservable::Sz0, "sz0"),
        ScanObs::PeakAmplitude => (ScanObservable::PeakAmplitude, "peak-amplitude"),
        ScanObs::PeakWidth => (ScanObservable::PeakWidth, "peak-width"),
        ScanObs::EchoWidth => (ScanObservable::EchoWidth, "echo-width"),
    };
    io::write_scan(io::create(&cfg.output.join(format!("scan_{tag}.csv")))?, &table.rows)?;
    let fit = FitJson::from(&scan::fit(&table.rows, vary, obs)?);
    io::write_json(&cfg.output.join(format!("fit_{tag}_{obs_tag}.json")), &fit)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}

fn cmd_oracle(cfg: &RunConfig) -> Result<()> {
    let spins = cfg.spins.unwrap_or(DEFAULT_ORACLE_SPINS);
    if spins > oracle::MAX_SPINS {
        return Err(Error::Config(format!(
            "exact diagonalization is capped at N = {}, got N = {spins}",
            oracle::MAX_SPINS
        )));
    }
    let protocol = QuenchProtocol::new(cfg.tau_q.unwrap_or(DEFAULT_ORACLE_TAU_Q), cfg.g_start)?;
    let t_max = cfg.t_max.unwrap_or(2.0 * spins as f64);
    let dt = cfg.dt.unwrap_or(oracle::DEFAULT_DT);
    let tol = cfg.tol.min(oracle::DEFAULT_TOL);
    let (report, run) = oracle::compare(spins, &protocol, t_max, dt, tol)?;
    let out = |name: &str| -> PathBuf { Path::new(&cfg.output).join(name) };
    io::write_series(io::create(&out(&format!("{}.csv", run.sz.observable)))?, &run.sz, SeriesColumns::default())?;
    io::write_series(io::create(&out(&format!("{}.csv", run.echo.observable)))?, &run.echo, SeriesColumns::default())?;
    io::write_json(&out("oracle.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.pass {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Error::OracleMismatch(format!(
            "max |dSz| = {:e}, max |dL| = {:e}",
            report.max_abs_dsz, report.max_abs_decho
        )))
    }
}
