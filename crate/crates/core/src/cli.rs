//! Command-line front end: `simulate`, `sweep`, `oracle`, `suite` and `preset`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DeviceParams, InputKind, PulseSpec};
use crate::observables::simulate;
use crate::oracle::{
    default_points, pulse_averaged_transmission, run_consistency_suite, two_atom_amplitudes, SuiteOptions,
    TransferOracleParams,
};
use crate::solver::{SolverConfig, SolverMode};
use crate::sweep::{preset, run_sweep, write_rows, OutputFormat, Preset, SweepGrid};

#[derive(Debug, Parser)]
#[command(name = "diode", version, about = "Two-atom waveguide diode simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one parameter point for both directions and print the metrics.
    Simulate(SimulateArgs),
    /// Run a sweep described by a TOML configuration.
    Sweep(SweepArgs),
    /// Print single-photon transfer-matrix transmission against θ.
    Oracle(OracleArgs),
    /// Run the internal consistency suite and print a JSON report.
    Suite(SuiteArgs),
    /// Print the TOML configuration of a figure preset.
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Steady,
    Time,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Photons in a Fock-state pulse.
    #[arg(long, conflicts_with = "nbar", required_unless_present = "nbar")]
    n: Option<u32>,
    /// Mean photon number of a coherent pulse.
    #[arg(long)]
    nbar: Option<f64>,
    /// Pulse bandwidth Ω/γ.
    #[arg(long, default_value_t = 0.01)]
    omega_ratio: f64,
    /// Detuning Δ/γ of the left atom.
    #[arg(long, default_value_t = 0.0)]
    delta_ratio: f64,
    /// Inter-atom phase θ/2π.
    #[arg(long)]
    theta: f64,
    /// Phase correction Δμ for light emitted by the detuned atom.
    #[arg(long, default_value_t = 0.0)]
    delta_mu: f64,
    #[arg(long, value_enum, default_value_t = Mode::Steady)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Configuration file, or `-` for standard input.
    #[arg(default_value = "-")]
    config: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.1)]
    delta_ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    theta_start: f64,
    #[arg(long, default_value_t = 1.0)]
    theta_stop: f64,
    #[arg(long, default_value_t = 101)]
    count: usize,
    /// Also average over a square pulse of this bandwidth Ω/γ.
    #[arg(long)]
    omega_ratio: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Bandwidth Ω/γ of the driven checks.
    #[arg(long, default_value_t = 0.01)]
    omega_ratio: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PresetArgs {
    #[arg(value_enum)]
    name: Preset,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct SimulateReport {
    t_fwd: f64,
    t_bwd: f64,
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
    flux: f64,
    rate_ref_fwd: f64,
    rate_ref_bwd: f64,
    rate_trans_fwd: f64,
    rate_trans_bwd: f64,
    solver_mode: SolverMode,
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let kind = match (a.n, a.nbar) {
        (Some(n), _) => InputKind::Fock(n),
        (None, Some(x)) => InputKind::Coherent(x),
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let params = DeviceParams::new(a.delta_ratio, a.theta).with_delta_mu(a.delta_mu);
    let config = match a.mode {
        Mode::Steady => SolverConfig::default(),
        Mode::Time => SolverConfig::time_domain(),
    };
    let r = simulate(&params, &kind, &PulseSpec::square(a.omega_ratio), &config)?;
    let report = SimulateReport {
        t_fwd: r.t_fwd,
        t_bwd: r.t_bwd,
        r1: r.r1,
        r2: r.r2,
        r3: r.r3,
        r4: r.r4,
        flux: r.flux,
        rate_ref_fwd: r.forward.rate_ref,
        rate_ref_bwd: r.backward.rate_ref,
        rate_trans_fwd: r.forward.rate_trans,
        rate_trans_bwd: r.backward.rate_trans,
        solver_mode: r.mode,
    };
    let mut out = output(&None)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(())
}

fn run_sweep_command(a: SweepArgs) -> Result<()> {
    let mut text = String::new();
    if a.config == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(&a.config)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", a.config)))?;
    }
    let grid = SweepGrid::from_toml(&text)?;
    let rows = run_sweep(&grid)?;
    write_rows(&rows, a.format, output(&a.out)?)
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    if a.count == 0 {
        return Err(Error::InvalidParameter("count must be positive".into()));
    }
    if let Some(w) = a.omega_ratio {
        PulseSpec::square(w).validate()?;
    }
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    let mut header = vec!["theta_over_2pi", "transmission", "reflection_fwd", "reflection_bwd"];
    if a.omega_ratio.is_some() {
        header.push("pulse_transmission");
    }
    w.write_record(&header)?;
    for k in 0..a.count {
        let theta = if a.count == 1 {
            a.theta_start
        } else {
            a.theta_start + (a.theta_stop - a.theta_start) * k as f64 / (a.count - 1) as f64
        };
        let params = DeviceParams::new(a.delta_ratio, theta);
        let amp = two_atom_amplitudes(&TransferOracleParams::at_carrier(&params));
        let mut record = vec![
            theta.to_string(),
            amp.t_forward.norm_sqr().to_string(),
            amp.r_forward.norm_sqr().to_string(),
            amp.r_backward.norm_sqr().to_string(),
        ];
        if let Some(omega) = a.omega_ratio {
            record.push(pulse_averaged_transmission(&params, omega).to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn run_suite(a: SuiteArgs) -> Result<bool> {
    PulseSpec::square(a.omega_ratio).validate()?;
    let options = SuiteOptions {
        omega: a.omega_ratio,
        ..SuiteOptions::default()
    };
    let report = run_consistency_suite(&default_points(), &options);
    let mut out = output(&a.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(report.passed)
}

fn run_preset(a: PresetArgs) -> Result<()> {
    let mut out = output(&a.out)?;
    out.write_all(preset(a.name).to_toml().as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn report_error(kind: &str, message: String) {
    let report = ErrorReport { error: kind, message };
    eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
}

/// Run the command line and return the process exit code: 0 on success,
/// 1 for invalid input, 2 for failed computations.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            report_error("usage", e.to_string().trim().to_string());
            return 1;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Sweep(a) => run_sweep_command(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Suite(a) => match run_suite(a) {
            Ok(true) => Ok(()),
            Ok(false) => {
                report_error("suite", "consistency checks failed".into());
                return 2;
            }
            Err(e) => Err(e),
        },
        Command::Preset(a) => run_preset(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) if e.is_validation() => {
            report_error("validation", e.to_string());
            1
        }
        Err(e) => {
            report_error("runtime", e.to_string());
            2
        }
    }
}

