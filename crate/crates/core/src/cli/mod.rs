//! Command-line harness: parameter ingestion, scans, perturbative comparisons, oracle checks
//! and the circuit mapper. Exit codes: 0 success, 1 runtime error, 2 validation failure.

pub mod circuit;
pub mod config;
pub mod scan;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dynamics::{
    critical_coupling, diagonalize, effective_from, evolution, normal_mode_frequencies,
    rwa_evolution, time_from_tau, OscillatorParams, SymplecticMatrix,
};
use crate::error::{Error, Result};
use crate::fockoracle::{bound_check, certified_series, DEFAULT_CUTOFF};
use crate::matcore::CMat;
use crate::metrics::compare;
use crate::perturbation::{
    convergence_order, exact_fidelity, vacuum_perturbative_fidelity, PerturbativeRegime,
};
use circuit::{circuit_map, collective_coupling, CircuitParams};
use config::{Format, InitialStateConfig, OracleConfig, Quantity, ScanConfig, TauGrid};
use scan::{format_value, run_scan, write_output};

/// Largest oracle deviation accepted by `oracle-check`.
pub const ORACLE_AGREEMENT: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(
    name = "rwa-fidelity",
    version,
    about = "Exact comparison of full and rotating-wave dynamics of two coupled bosonic modes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Physical parameters, from a config file and/or flags (flags win).
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// JSON scan configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_b: Option<f64>,
    /// Sets both couplings.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub g_bs: Option<f64>,
    #[arg(long)]
    pub g_sq: Option<f64>,
    /// Squeezing parameter of the initial squeezed pair (0 for vacuum).
    #[arg(long)]
    pub squeezing: Option<f64>,
}

/// Dimensionless time grid overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub tau_start: Option<f64>,
    #[arg(long)]
    pub tau_end: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Output destination and format.
#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks stability and prints critical coupling and normal-mode frequencies.
    Validity {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Prints the full, rotating-wave and effective Bogoliubov blocks at one time.
    Evolve {
        #[command(flatten)]
        params: ParamArgs,
        /// Absolute time.
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fidelity, Bures distance, ΔN and squeezing parameters over a τ grid.
    FidelityScan {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Adds Fock-oracle columns.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        cutoff: Option<usize>,
        /// Prints the effective configuration as JSON and exits.
        #[arg(long)]
        dump_config: bool,
    },
    /// Exact versus lowest-order vacuum fidelity on a coupling ladder, with fitted orders.
    PerturbativeCompare {
        /// Comma-separated dimensionless couplings.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
        ladder: Vec<f64>,
        /// Fixed dimensionless time.
        #[arg(long, conflicts_with = "g_tau")]
        tau: Option<f64>,
        /// Fixed product g̃τ instead of fixed τ.
        #[arg(long)]
        g_tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        squeezing: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compares the symplectic route with the Fock oracle, or checks the Fock-state bound.
    OracleCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        cutoff: Option<usize>,
        /// Checks the bound for `|n_a, n_b⟩` at every grid time instead.
        #[arg(long, value_delimiter = ',')]
        fock_state: Option<Vec<usize>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maps a pumped circuit to effective parameters in the doubly rotating frame.
    CircuitMap {
        #[arg(long)]
        epsilon_a: f64,
        #[arg(long)]
        epsilon_b: f64,
        #[arg(long, default_value_t = 0.0)]
        pump_sq_amp: f64,
        #[arg(long, default_value_t = 0.0)]
        pump_sq_freq: f64,
        #[arg(long, default_value_t = 0.0)]
        pump_bs_amp: f64,
        #[arg(long, default_value_t = 0.0)]
        pump_bs_freq: f64,
        /// Detuning kept by mode a.
        #[arg(long)]
        omega_a: f64,
        /// Detuning kept by mode b.
        #[arg(long)]
        omega_b: f64,
        /// Number of identical emitters for the collective coupling `√N·g`.
        #[arg(long, requires = "g_single")]
        emitters: Option<u64>,
        #[arg(long)]
        g_single: Option<f64>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code of an error: 2 for validation failures, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        2
    } else {
        1
    }
}

fn default_config() -> ScanConfig {
    ScanConfig {
        params: OscillatorParams {
            omega_a: 1.0,
            omega_b: 1.0,
            g_bs: 0.0,
            g_sq: 0.0,
        },
        initial_state: InitialStateConfig::Vacuum,
        tau_grid: TauGrid {
            start: 0.0,
            end: 10.0,
            steps: 101,
        },
        outputs: Quantity::ALL[..5].to_vec(),
        oracle: OracleConfig::default(),
        output_path: None,
        format: Format::Csv,
    }
}

/// Builds a scan configuration from an optional file and flag overrides.
pub fn resolve_config(
    params: &ParamArgs,
    grid: &GridArgs,
    output: &OutputArgs,
) -> Result<ScanConfig> {
    let mut cfg = match &params.config {
        Some(path) => ScanConfig::load(path)?,
        None => default_config(),
    };
    let p = &mut cfg.params;
    if let Some(x) = params.omega_a {
        p.omega_a = x;
    }
    if let Some(x) = params.omega_b {
        p.omega_b = x;
    }
    if let Some(x) = params.g {
        p.g_bs = x;
        p.g_sq = x;
    }
    if let Some(x) = params.g_bs {
        p.g_bs = x;
    }
    if let Some(x) = params.g_sq {
        p.g_sq = x;
    }
    if let Some(s) = params.squeezing {
        cfg.initial_state = if s == 0.0 {
            InitialStateConfig::Vacuum
        } else {
            InitialStateConfig::Squeezed { s }
        };
    }
    if let Some(x) = grid.tau_start {
        cfg.tau_grid.start = x;
    }
    if let Some(x) = grid.tau_end {
        cfg.tau_grid.end = x;
    }
    if let Some(x) = grid.steps {
        cfg.tau_grid.steps = x;
    }
    if let Some(path) = &output.output {
        cfg.output_path = Some(path.to_string_lossy().into_owned());
    }
    if let Some(f) = output.format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_output<F>(path: Option<&Path>, out: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

/// A simple table of numbers with named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Writes CSV (17 significant digits) or JSON.
    pub fn write(&self, format: Format, w: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(&self.columns)?;
                for row in &self.rows {
                    wr.write_record(row.iter().map(|&x| format_value(x)))?;
                }
                wr.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, self)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

fn format_matrix(m: &CMat) -> String {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    format!("{:+.12e}{:+.12e}i", z.re, z.im)
                })
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Serialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let n = m.dim();
        MatrixJson {
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct EvolveJson {
    time: f64,
    full_alpha: MatrixJson,
    full_beta: MatrixJson,
    rwa_alpha: MatrixJson,
    effective_alpha: MatrixJson,
    effective_beta: MatrixJson,
}

fn evolve_text(
    t: f64,
    full: &SymplecticMatrix,
    rwa: &SymplecticMatrix,
    eff: &SymplecticMatrix,
) -> String {
    format!(
        "t = {t}\nfull alpha:\n{}\nfull beta:\n{}\nrwa alpha:\n{}\neffective alpha:\n{}\neffective beta:\n{}\n",
        format_matrix(&full.alpha),
        format_matrix(&full.beta),
        format_matrix(&rwa.alpha),
        format_matrix(&eff.alpha),
        format_matrix(&eff.beta)
    )
}

/// Runs one command, writing results to `out` (or to the requested file).
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Validity { params } => {
            let cfg = resolve_config(params, &GridArgs::default(), &OutputArgs::default())?;
            let p = cfg.params;
            let (kp, km) = normal_mode_frequencies(&p)?;
            writeln!(out, "stable: true")?;
            writeln!(out, "critical_coupling: {}", critical_coupling(&p))?;
            writeln!(out, "kappa_plus: {kp}")?;
            writeln!(out, "kappa_minus: {km}")?;
            if p.has_equal_couplings() {
                writeln!(out, "mixing_angle: {}", diagonalize(&p)?.theta)?;
            }
            Ok(())
        }
        Command::Evolve {
            params,
            time,
            output,
        } => {
            let cfg = resolve_config(params, &GridArgs::default(), &OutputArgs::default())?;
            if !time.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "time {time} is not finite"
                )));
            }
            let full = evolution(&cfg.params, *time)?;
            let rwa = rwa_evolution(&cfg.params, *time);
            let eff = effective_from(&full, &rwa);
            with_output(output.output.as_deref(), out, |w| {
                match output.format {
                    Some(Format::Json) => {
                        let j = EvolveJson {
                            time: *time,
                            full_alpha: (&full.alpha).into(),
                            full_beta: (&full.beta).into(),
                            rwa_alpha: (&rwa.alpha).into(),
                            effective_alpha: (&eff.alpha).into(),
                            effective_beta: (&eff.beta).into(),
                        };
                        serde_json::to_writer_pretty(&mut *w, &j)?;
                        writeln!(w)?;
                    }
                    _ => write!(w, "{}", evolve_text(*time, &full, &rwa, &eff))?,
                }
                Ok(())
            })
        }
        Command::FidelityScan {
            params,
            grid,
            output,
            oracle,
            cutoff,
            dump_config,
        } => {
            let mut cfg = resolve_config(params, grid, output)?;
            if *oracle {
                cfg.oracle.enabled = true;
            }
            if let Some(c) = cutoff {
                cfg.oracle.cutoff = *c;
            }
            cfg.validate()?;
            if *dump_config {
                writeln!(out, "{}", cfg.to_json()?)?;
                return Ok(());
            }
            let result = run_scan(&cfg)?;
            with_output(cfg.output_path.as_deref().map(Path::new), out, |w| {
                write_output(&result, cfg.format, w)
            })?;
            eprintln!("summary: {}", result.summary);
            Ok(())
        }
        Command::PerturbativeCompare {
            ladder,
            tau,
            g_tau,
            squeezing,
            output,
        } => {
            let mut rows = Vec::new();
            for &g in ladder {
                let t = match (tau, g_tau) {
                    (_, Some(gt)) if g > 0.0 => gt / g,
                    (_, Some(_)) => 0.0,
                    (Some(t), None) => *t,
                    (None, None) => 2.0,
                };
                let r = PerturbativeRegime::resonant(g, t, *squeezing)?;
                let exact = exact_fidelity(&r)?;
                let approx = vacuum_perturbative_fidelity(&r).value;
                rows.push(vec![
                    g,
                    t,
                    exact,
                    approx,
                    1.0 - exact,
                    (exact - approx).abs(),
                ]);
            }
            let table = Table {
                columns: [
                    "g_tilde",
                    "tau",
                    "fidelity_exact",
                    "fidelity_second_order",
                    "infidelity",
                    "residual",
                ]
                .map(String::from)
                .to_vec(),
                rows,
            };
            with_output(output.output.as_deref(), out, |w| {
                table.write(output.format.unwrap_or_default(), w)
            })?;
            let infid: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[0], r[4])).collect();
            let resid: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[0], r[5])).collect();
            let order = convergence_order(&infid)?;
            eprintln!("infidelity_order: {order:.4}");
            if *squeezing == 0.0 {
                if let Ok(o) = convergence_order(&resid) {
                    eprintln!("residual_order: {o:.4}");
                }
            }
            Ok(())
        }
        Command::OracleCheck {
            params,
            grid,
            cutoff,
            fock_state,
            output,
        } => {
            let cfg = resolve_config(params, grid, output)?;
            let p = cfg.params;
            let cutoff = cutoff.unwrap_or(DEFAULT_CUTOFF);
            let taus = cfg.tau_grid.points();
            let times: Vec<f64> = taus.iter().map(|&t| time_from_tau(t, p.omega_a)).collect();
            let format = output.format.unwrap_or_default();
            if let Some(fs) = fock_state {
                let &[na, nb] = fs.as_slice() else {
                    return Err(Error::InvalidParameter(
                        "--fock-state expects two occupations n_a,n_b".into(),
                    ));
                };
                let mut rows = Vec::new();
                let mut violated = false;
                for (&tau, &t) in taus.iter().zip(&times) {
                    let c = bound_check(na, nb, &p, t, cutoff)?;
                    violated |= !c.satisfied;
                    rows.push(vec![tau, c.z_exact, c.z_max, c.doubling_change]);
                }
                let table = Table {
                    columns: ["tau", "z_exact", "z_max", "doubling_change"]
                        .map(String::from)
                        .to_vec(),
                    rows,
                };
                with_output(output.output.as_deref(), out, |w| table.write(format, w))?;
                if violated {
                    return Err(Error::Consistency(
                        "the Fock-state bound is violated".into(),
                    ));
                }
                eprintln!("bound satisfied at every grid time");
                return Ok(());
            }
            let state = cfg.initial_state.gaussian()?;
            let cert = certified_series(&p, cfg.initial_state.oracle_input(), &times, cutoff)?;
            let mut rows = Vec::new();
            let mut dev: f64 = 0.0;
            for (&tau, o) in taus.iter().zip(&cert.results) {
                let c = compare(&state.factor, &p, o.time)?;
                let df = (c.report.fidelity - o.fidelity).abs();
                let dn = (c.delta_n - o.delta_n).abs();
                dev = dev.max(df).max(dn);
                rows.push(vec![
                    tau,
                    c.report.fidelity,
                    o.fidelity,
                    df,
                    c.delta_n,
                    o.delta_n,
                    dn,
                ]);
            }
            let table = Table {
                columns: [
                    "tau",
                    "fidelity",
                    "fidelity_oracle",
                    "fidelity_deviation",
                    "delta_n",
                    "delta_n_oracle",
                    "delta_n_deviation",
                ]
                .map(String::from)
                .to_vec(),
                rows,
            };
            with_output(output.output.as_deref(), out, |w| table.write(format, w))?;
            let used = cert.results.first().map_or(cutoff, |r| r.cutoff);
            eprintln!(
                "max_deviation={dev:.3e} cutoff={used} doubling_change={:.3e}",
                cert.doubling_change
            );
            if dev > ORACLE_AGREEMENT {
                return Err(Error::Consistency(format!(
                    "oracle and symplectic routes differ by {dev:e}"
                )));
            }
            Ok(())
        }
        Command::CircuitMap {
            epsilon_a,
            epsilon_b,
            pump_sq_amp,
            pump_sq_freq,
            pump_bs_amp,
            pump_bs_freq,
            omega_a,
            omega_b,
            emitters,
            g_single,
        } => {
            let report = circuit_map(&CircuitParams {
                epsilon_a: *epsilon_a,
                epsilon_b: *epsilon_b,
                pump_sq_amp: *pump_sq_amp,
                pump_sq_freq: *pump_sq_freq,
                pump_bs_amp: *pump_bs_amp,
                pump_bs_freq: *pump_bs_freq,
                omega_a: *omega_a,
                omega_b: *omega_b,
            })?;
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
            if let (Some(n), Some(g)) = (emitters, g_single) {
                writeln!(out, "collective_coupling: {}", collective_coupling(*n, *g)?)?;
            }
            Ok(())
        }
    }
}
