//! Command-line driver behind the `catmap` binary.
//!
//! Each subcommand reads a [`Config`], writes its data files into the
//! output directory and finishes with `manifest.json`, which stamps the
//! config digest, seed and crate version. No output contains timestamps or
//! host details, so a rerun with the same config reproduces every byte.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O error.

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::Config;

use crate::analysis::{fit_damped_cosine, fit_scaling, gamma_sweep, FitOptions, FitResult, SweepCell, SweepOptions};
use crate::circuit::compile_map_with;
use crate::dynamics::poincare_section;
use crate::error::Error;
use crate::evolution::{evolve, EvolutionConfig};
use crate::oracle::SplitOperator;
use crate::qstate::{fidelity, grid_x, StateVector};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "catmap", version, about = "Quantum double-well map simulator")]
pub struct Cli {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Noise seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Worker threads, 0 = all cores; overrides the config.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Override a config key, e.g. `--set n_qubits=7`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print the effective config with descriptions and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Circuit,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Classical orbits: poincare.csv.
    Poincare,
    /// Quantum evolution: wx.csv and wa.csv.
    Evolve,
    /// Damped-cosine fit of W_a(t): fit.json.
    Fit,
    /// Decay-rate sweep: sweep.csv and scaling.json.
    Sweep,
    /// Gate tallies per iteration: gatecount.json.
    Gatecount,
    /// Exact circuit against the split-operator oracle: compare.csv and compare.json.
    CompareOracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Poincare => "poincare",
            Command::Evolve => "evolve",
            Command::Fit => "fit",
            Command::Sweep => "sweep",
            Command::Gatecount => "gatecount",
            Command::CompareOracle => "compare-oracle",
        }
    }
}

/// Failure classes, one per nonzero exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Failure::Io(e.to_string())
        } else {
            Failure::Config(format!("malformed csv: {e}"))
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Identity of a run, embedded in every JSON output.
#[derive(Debug, Clone, Serialize)]
struct Stamp {
    config_digest: String,
    seed: u64,
    version: &'static str,
}

struct Run<'a> {
    cfg: &'a Config,
    out_dir: &'a Path,
    stamp: Stamp,
    outputs: Vec<String>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        fs::write(self.out_dir.join(name), bytes)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
        self.write(name, &bytes)
    }

    fn finish(mut self, command: Command) -> CliResult<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            #[serde(flatten)]
            stamp: &'a Stamp,
            config: BTreeMap<&'a str, &'a str>,
            outputs: &'a [String],
        }
        let outputs = std::mem::take(&mut self.outputs);
        let stamp = self.stamp.clone();
        let manifest = Manifest { command: command.name(), stamp: &stamp, config: self.cfg.entries().collect(), outputs: &outputs };
        self.write_json("manifest.json", &manifest)
    }
}

fn resolve_config(cli: &Cli) -> CliResult<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))??,
        None => Config::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = cli.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(b) = cli.backend {
        cfg.set("backend", if b == BackendArg::Oracle { "oracle" } else { "circuit" })?;
    }
    if let Some(w) = cli.workers {
        cfg.set("workers", &w.to_string())?;
    }
    Ok(cfg)
}

fn evolution_config(cfg: &Config) -> CliResult<EvolutionConfig> {
    let params = cfg.params()?;
    let mut ev = EvolutionConfig::new(params, cfg.value("iterations")?);
    ev.initial = cfg.initial(&params)?;
    ev.stride = cfg.value("stride")?;
    ev.backend = cfg.backend()?;
    ev.expansion = cfg.expansion()?;
    ev.noise = cfg.noise()?;
    ev.realizations = cfg.value("realizations")?;
    Ok(ev)
}

fn wa_rows(times: &[usize], alive: &[f64]) -> Vec<Vec<String>> {
    times.iter().zip(alive).map(|(t, w)| vec![t.to_string(), w.to_string()]).collect()
}

fn cmd_poincare(run: &mut Run) -> CliResult<()> {
    let orbits = poincare_section(&run.cfg.poincare_starts()?, &run.cfg.params()?, run.cfg.value("poincare_iters")?)?;
    let rows = orbits.iter().flat_map(|o| {
        o.points
            .iter()
            .enumerate()
            .map(move |(i, pt)| vec![o.id.to_string(), (i + 1).to_string(), pt.x.to_string(), pt.p.to_string()])
    });
    run.write_csv("poincare.csv", &["orbit_id", "t", "x", "p"], rows)
}

fn cmd_evolve(run: &mut Run) -> CliResult<()> {
    let mut ev = evolution_config(run.cfg)?;
    ev.record_distributions = true;
    let traj = evolve(&ev)?;
    let n = ev.params.levels();
    let rows = traj.times.iter().zip(&traj.distributions).flat_map(|(t, dist)| {
        dist.iter()
            .enumerate()
            .map(move |(m, w)| vec![t.to_string(), m.to_string(), grid_x(m, n).to_string(), w.to_string()])
    });
    run.write_csv("wx.csv", &["t", "m", "x", "W"], rows)?;
    run.write_csv("wa.csv", &["t", "W_a"], wa_rows(&traj.times, &traj.alive))
}

fn read_series(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Failure::Config(format!("{}: missing column {name}", path.display())))
    };
    let (ti, wi) = (col("t")?, col("W_a")?);
    let (mut t, mut w) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Failure::Config(format!("{}: bad number in row {}", path.display(), row + 1)))
        };
        t.push(num(ti)?);
        w.push(num(wi)?);
    }
    Ok((t, w, bytes))
}

fn cmd_fit(run: &mut Run) -> CliResult<()> {
    let input = run.cfg.get("fit_input").trim().to_string();
    let (times, values, raw) = if input.is_empty() {
        let traj = evolve(&evolution_config(run.cfg)?)?;
        let mut text = String::from("t,W_a\n");
        for (t, w) in traj.times.iter().zip(&traj.alive) {
            writeln!(text, "{t},{w}").unwrap();
        }
        (traj.times.iter().map(|&t| t as f64).collect(), traj.alive, text.into_bytes())
    } else {
        read_series(Path::new(&input))?
    };
    let fit = fit_damped_cosine(&times, &values, &FitOptions::default())?;

    #[derive(Serialize)]
    struct FitReport<'a> {
        #[serde(flatten)]
        fit: FitResult,
        samples: usize,
        input_digest: String,
        #[serde(flatten)]
        stamp: &'a Stamp,
    }
    let report = FitReport { fit, samples: times.len(), input_digest: hex::encode(Sha256::digest(&raw)), stamp: &run.stamp };
    let value = serde_json::to_value(&report)?;
    run.write_json("fit.json", &value)
}

fn sweep_cells(cfg: &Config) -> CliResult<Vec<SweepCell>> {
    let nqs: Vec<usize> = cfg.list("sweep_n_qubits")?;
    let iters: Vec<usize> = cfg.list("sweep_iterations")?;
    if iters.len() != 1 && iters.len() != nqs.len() {
        return Err(Failure::Config("sweep_iterations needs one value or one per sweep_n_qubits entry".into()));
    }
    let (ks, as_, eps): (Vec<f64>, Vec<f64>, Vec<f64>) = (cfg.list("sweep_k")?, cfg.list("sweep_a")?, cfg.list("sweep_epsilon")?);
    let mut cells = Vec::new();
    for (i, &nq) in nqs.iter().enumerate() {
        for &k in &ks {
            for &a in &as_ {
                for &e in &eps {
                    let mut cell = SweepCell::new(nq, k, a, e, iters[if iters.len() == 1 { 0 } else { i }]);
                    cell.seed = cfg.value("seed")?;
                    cell.realizations = cfg.value("realizations")?;
                    cell.stride = cfg.value("stride")?;
                    cell.exempt_work_qubit = cfg.value("exempt_work_qubit")?;
                    if cfg.get("initial") == "step" {
                        cell.initial = Some(crate::evolution::InitialState::Step);
                    }
                    crate::dynamics::MapParams::new(k, a, nq).map_err(|e| Failure::Config(e.to_string()))?;
                    cells.push(cell);
                }
            }
        }
    }
    Ok(cells)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn cmd_sweep(run: &mut Run) -> CliResult<()> {
    let cells = sweep_cells(run.cfg)?;
    let opts = SweepOptions { expansion: run.cfg.expansion()?, ..SweepOptions::default() };
    let records = gamma_sweep(&cells, &opts);
    let rows = records.iter().map(|r| {
        vec![
            r.n_qubits.to_string(),
            r.k.to_string(),
            r.a.to_string(),
            r.epsilon.to_string(),
            r.seed.to_string(),
            r.realizations.to_string(),
            opt(r.period),
            opt(r.gamma),
            opt(r.rms_residual),
            r.status.clone(),
        ]
    });
    run.write_csv(
        "sweep.csv",
        &["n_q", "K", "a", "epsilon", "seed", "realizations", "T_u", "gamma", "rms_residual", "status"],
        rows,
    )?;
    let scaling = match fit_scaling(&records) {
        Ok(s) => serde_json::json!({ "status": "ok", "result": s, "run": run.stamp }),
        Err(e) => serde_json::json!({ "status": e.to_string(), "run": run.stamp }),
    };
    run.write_json("scaling.json", &scaling)
}

fn cmd_gatecount(run: &mut Run) -> CliResult<()> {
    let params = run.cfg.params()?;
    let expansion = run.cfg.expansion()?;
    let circuit = compile_map_with(&params, expansion);
    let counts = circuit.counts();
    let report = serde_json::json!({
        "n_qubits": params.n_qubits,
        "expansion": run.cfg.get("expansion"),
        "kick_toffoli": counts.kick_toffoli,
        "kick_phase": counts.kick_phase,
        "qft_h": counts.qft_h,
        "qft_cphase": counts.qft_cphase,
        "kinetic_phase": counts.kinetic_phase,
        "total": counts.total,
        "total_per_nq4": counts.total as f64 / (params.n_qubits as f64).powi(4),
        "run": run.stamp,
    });
    run.write_json("gatecount.json", &report)?;
    if run.cfg.value::<bool>("dump_gates")? {
        run.write("gates.txt", circuit.dump().as_bytes())?;
    }
    Ok(())
}

fn cmd_compare_oracle(run: &mut Run) -> CliResult<()> {
    let params = run.cfg.params()?;
    if params.n_qubits < 5 {
        return Err(Failure::Config("compare-oracle needs n_q >= 5".into()));
    }
    let iterations: usize = run.cfg.value("compare_iterations")?;
    let circuit = compile_map_with(&params, run.cfg.expansion()?);
    let mut state = run.cfg.initial(&params)?.prepare(&params)?;
    let mut psi = state.register().to_vec();
    let mut prop = SplitOperator::new(&params);
    let mut rows = Vec::with_capacity(iterations);
    let (mut min_f, mut max_work) = (1.0f64, 0.0f64);
    let mut last = 1.0;
    for t in 1..=iterations {
        circuit.apply(&mut state)?;
        prop.step(&mut psi)?;
        let f = fidelity(&state, &StateVector::from_register(params.n_qubits, &psi)?)?;
        min_f = min_f.min(f);
        max_work = max_work.max(state.work_population());
        last = f;
        rows.push(vec![t.to_string(), f.to_string(), state.work_population().to_string()]);
    }
    run.write_csv("compare.csv", &["t", "fidelity", "work_population"], rows)?;
    let report = serde_json::json!({
        "n_qubits": params.n_qubits,
        "iterations": iterations,
        "min_fidelity": min_f,
        "final_fidelity": last,
        "max_work_population": max_work,
        "run": run.stamp,
    });
    run.write_json("compare.json", &report)
}

fn dispatch(cli: &Cli, cfg: &Config, command: Command) -> CliResult<()> {
    fs::create_dir_all(&cli.out_dir)?;
    let stamp = Stamp { config_digest: cfg.digest(), seed: cfg.value("seed")?, version: VERSION };
    let mut run = Run { cfg, out_dir: &cli.out_dir, stamp, outputs: Vec::new() };
    // reject a bad backend for every command, not only those that use it
    cfg.backend()?;
    match command {
        Command::Poincare => cmd_poincare(&mut run)?,
        Command::Evolve => cmd_evolve(&mut run)?,
        Command::Fit => cmd_fit(&mut run)?,
        Command::Sweep => cmd_sweep(&mut run)?,
        Command::Gatecount => cmd_gatecount(&mut run)?,
        Command::CompareOracle => cmd_compare_oracle(&mut run)?,
    }
    run.finish(command)
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = resolve_config(cli)?;
    if cli.show_config {
        print!("{}", cfg.render_annotated());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Failure::Config("no subcommand given; see --help".into()));
    };
    let workers: usize = cfg.value("workers")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Config(format!("worker pool: {e}")))?;
    pool.install(|| dispatch(cli, &cfg, command))
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("catmap: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
