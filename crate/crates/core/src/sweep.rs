//! Parameter sweeps over photon number, bandwidth, detuning and phase.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DeviceParams, InputKind, PulseSpec};
use crate::observables::simulate;
use crate::solver::{SolverConfig, SolverMode};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "DIODE_WORKERS";

/// Values along one axis: an explicit list or an evenly spaced range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Axis {
    pub fn single(x: f64) -> Self {
        Axis::Values(vec![x])
    }

    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Axis::Range {
            start,
            stop,
            count,
            log: false,
        }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        Axis::Range {
            start,
            stop,
            count,
            log: true,
        }
    }

    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let out = match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, stop, count, log } => {
                let (start, stop, count) = (*start, *stop, *count);
                if *log && !(start > 0.0 && stop > 0.0) {
                    return Err(Error::Config(format!("log axis {name} needs positive endpoints")));
                }
                let (a, b) = if *log { (start.ln(), stop.ln()) } else { (start, stop) };
                (0..count)
                    .map(|k| {
                        let x = if count == 1 {
                            a
                        } else {
                            a + (b - a) * k as f64 / (count - 1) as f64
                        };
                        if *log {
                            x.exp()
                        } else {
                            x
                        }
                    })
                    .collect()
            }
        };
        if out.is_empty() {
            return Err(Error::Config(format!("axis {name} is empty")));
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("axis {name} has non-finite values")));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFamily {
    #[default]
    Fock,
    Coherent,
}

/// A sweep definition, read from a TOML document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub schema_version: u32,
    #[serde(default)]
    pub input: InputFamily,
    /// Photon numbers, for Fock input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u32>>,
    /// Mean photon numbers, for coherent input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<Axis>,
    pub omega_over_gamma: Axis,
    pub delta_over_gamma: Axis,
    pub theta_over_2pi: Axis,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub delta_mu: f64,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub kind: InputKind,
    pub omega_over_gamma: f64,
    pub delta_over_gamma: f64,
    pub theta_over_2pi: f64,
}

impl SweepGrid {
    pub fn from_toml(text: &str) -> Result<Self> {
        let grid: SweepGrid = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grid serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.solver.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.points().map(|_| ())
    }

    fn photon_axis(&self) -> Result<Vec<InputKind>> {
        match self.input {
            InputFamily::Fock => {
                if self.nbar.is_some() {
                    return Err(Error::Config("nbar is only valid for coherent input".into()));
                }
                let n = self.n.as_ref().ok_or_else(|| Error::Config("Fock input needs n".into()))?;
                if n.is_empty() {
                    return Err(Error::Config("axis n is empty".into()));
                }
                Ok(n.iter().map(|&n| InputKind::Fock(n)).collect())
            }
            InputFamily::Coherent => {
                if self.n.is_some() {
                    return Err(Error::Config("n is only valid for Fock input".into()));
                }
                let axis = self.nbar.as_ref().ok_or_else(|| Error::Config("coherent input needs nbar".into()))?;
                let values = axis.values("nbar")?;
                if values.iter().any(|&x| x < 0.0) {
                    return Err(Error::Config("nbar must be non-negative".into()));
                }
                Ok(values.into_iter().map(InputKind::Coherent).collect())
            }
        }
    }

    /// All points in grid order: photons, then bandwidth, phase and detuning.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        let photons = self.photon_axis()?;
        let omegas = self.omega_over_gamma.values("omega_over_gamma")?;
        if omegas.iter().any(|&w| w <= 0.0) {
            return Err(Error::Config("omega_over_gamma must be positive".into()));
        }
        let deltas = self.delta_over_gamma.values("delta_over_gamma")?;
        let thetas = self.theta_over_2pi.values("theta_over_2pi")?;
        let mut points = Vec::with_capacity(photons.len() * omegas.len() * deltas.len() * thetas.len());
        for kind in &photons {
            for &omega in &omegas {
                for &theta in &thetas {
                    for &delta in &deltas {
                        points.push(GridPoint {
                            kind: kind.clone(),
                            omega_over_gamma: omega,
                            delta_over_gamma: delta,
                            theta_over_2pi: theta,
                        });
                    }
                }
            }
        }
        Ok(points)
    }
}

/// One output row. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: Option<u32>,
    pub nbar: f64,
    pub omega_over_gamma: f64,
    pub delta_over_gamma: f64,
    pub theta_over_2pi: f64,
    pub flux_over_gamma: f64,
    pub t_fwd: f64,
    pub t_bwd: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub solver_mode: SolverMode,
    pub converged: bool,
}

/// Evaluate one point; failures give a row with `converged = false`.
pub fn evaluate_point(point: &GridPoint, delta_mu: f64, config: &SolverConfig) -> SweepRow {
    let params = DeviceParams::new(point.delta_over_gamma, point.theta_over_2pi).with_delta_mu(delta_mu);
    // rates are in units of γ = 1, so Ω/γ is Ω
    let pulse = PulseSpec::square(point.omega_over_gamma);
    let (n, nbar) = match point.kind {
        InputKind::Fock(n) => (Some(n), n as f64),
        InputKind::Coherent(x) => (None, x),
        InputKind::Superposition(_) => unreachable!("grids hold Fock or coherent inputs"),
    };
    let flux = nbar * pulse.plateau_amplitude().norm_sqr();
    let mut row = SweepRow {
        n,
        nbar,
        omega_over_gamma: point.omega_over_gamma,
        delta_over_gamma: point.delta_over_gamma,
        theta_over_2pi: point.theta_over_2pi,
        flux_over_gamma: flux,
        t_fwd: f64::NAN,
        t_bwd: f64::NAN,
        r1: f64::NAN,
        r2: f64::NAN,
        r3: f64::NAN,
        r4: f64::NAN,
        solver_mode: config.mode,
        converged: false,
    };
    if let Ok(r) = simulate(&params, &point.kind, &pulse, config) {
        row.t_fwd = r.t_fwd;
        row.t_bwd = r.t_bwd;
        row.r1 = r.r1;
        row.r2 = r.r2;
        row.r3 = r.r3;
        row.r4 = r.r4;
        row.converged = true;
    }
    row
}

/// Worker count from the environment, defaulting to the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Evaluate every grid point, in parallel, returning rows in grid order.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    run_sweep_with_workers(grid, worker_count()?)
}

pub fn run_sweep_with_workers(grid: &SweepGrid, workers: usize) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let points = grid.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_point(p, grid.delta_mu, &grid.solver))
            .collect()
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            if rows.is_empty() {
                w.write_record(CSV_COLUMNS)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub const CSV_COLUMNS: [&str; 14] = [
    "n",
    "nbar",
    "omega_over_gamma",
    "delta_over_gamma",
    "theta_over_2pi",
    "flux_over_gamma",
    "t_fwd",
    "t_bwd",
    "r1",
    "r2",
    "r3",
    "r4",
    "solver_mode",
    "converged",
];

/// Named figure configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// θ×Δ maps of R₁ for n = 1…5 at Ω/γ = 10⁻².
    Fig2,
    /// θ×Ω maps for n = 1…5 at Δ/γ = 0.1.
    Fig2Bandwidth,
    /// R₁ against Δ at θ/2π = 0.5025 for n = 1…5 and 22.
    Fig3,
    /// θ×Δ maps of all four metrics for n = 2.
    Fig4,
    /// R₁ and R₄ against Δ at θ/2π = 0.5025 for n = 22.
    Fig5,
    /// Coherent input across the flux plateau at the optimal device point.
    Plateau,
}

/// Device point with the largest coherent R₁ at n̄ = 2 and Ω/γ = 10⁻² on the
/// 101×101 map used by the `fig2` preset. Returns (Δ/γ, θ/2π, R₁).
pub fn optimal_point() -> (f64, f64, f64) {
    let grid = SweepGrid {
        schema_version: SCHEMA_VERSION,
        input: InputFamily::Coherent,
        n: None,
        nbar: Some(Axis::single(2.0)),
        ..preset(Preset::Fig2)
    };
    let rows = run_sweep(&grid).expect("preset grid is valid");
    rows.iter()
        .filter(|r| r.converged && r.r1.is_finite())
        .max_by(|a, b| a.r1.total_cmp(&b.r1))
        .map(|r| (r.delta_over_gamma, r.theta_over_2pi, r.r1))
        .expect("some point converges")
}

pub fn preset(which: Preset) -> SweepGrid {
    let heat = |n: Vec<u32>| SweepGrid {
        schema_version: SCHEMA_VERSION,
        input: InputFamily::Fock,
        n: Some(n),
        nbar: None,
        omega_over_gamma: Axis::single(0.01),
        delta_over_gamma: Axis::linear(-0.5, 0.5, 101),
        theta_over_2pi: Axis::linear(0.0, 1.0, 101),
        delta_mu: 0.0,
        solver: SolverConfig::default(),
    };
    let line = |n: Vec<u32>| SweepGrid {
        delta_over_gamma: Axis::linear(-0.2, 0.2, 201),
        theta_over_2pi: Axis::single(0.5025),
        ..heat(n)
    };
    match which {
        Preset::Fig2 => heat(vec![1, 2, 3, 4, 5]),
        Preset::Fig2Bandwidth => SweepGrid {
            omega_over_gamma: Axis::log(1e-6, 1e-1, 51),
            delta_over_gamma: Axis::single(0.1),
            ..heat(vec![1, 2, 3, 4, 5])
        },
        Preset::Fig3 => line(vec![1, 2, 3, 4, 5, 22]),
        Preset::Fig4 => heat(vec![2]),
        Preset::Fig5 => line(vec![22]),
        Preset::Plateau => {
            let (delta, theta, _) = optimal_point();
            SweepGrid {
                input: InputFamily::Coherent,
                n: None,
                // F/γ = n̄Ω/2 spans [1e-4, 1]
                nbar: Some(Axis::log(2e-2, 2e2, 201)),
                delta_over_gamma: Axis::single(delta),
                theta_over_2pi: Axis::single(theta),
                ..heat(vec![])
            }
        }
    }
}
