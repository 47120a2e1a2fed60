//! Photon rates, transmittivities and rectification metrics.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchy, ElementFunctional};
use crate::model::{mean_flux, DeviceParams, Direction, InputKind, InputState, PulseSpec};
use crate::operators::Op;
use crate::solver::{
    solve_coherent, solve_steady_fock, solve_time_domain, Diagnostics, SolverConfig, SolverMode, SteadySolution,
    Tail, TimeDomainOptions,
};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Phase between the two atomic contributions to the light leaving the device
/// in the direction opposite to `travel`.
fn output_phase(params: &DeviceParams, backward_of: Direction) -> f64 {
    match backward_of {
        // leaves to the left: atom 2's light crosses the gap at ω₀
        Direction::Left => params.theta,
        // leaves to the right: atom 1's light crosses the gap at ω₁
        Direction::Right => -params.theta_detuned(),
    }
}

/// `γ·S†S` for the light radiated by the atoms into the mode with phase `phi`:
/// `γ[(1+σz⁽¹⁾)/2 + (1+σz⁽²⁾)/2 + e^{iφ}σ₊⁽¹⁾σ₋⁽²⁾ + e^{−iφ}σ₋⁽¹⁾σ₊⁽²⁾]`.
fn radiated_flux(params: &DeviceParams, phi: f64) -> ElementFunctional {
    let g = params.gamma;
    ElementFunctional {
        identity: re(g),
        terms: vec![
            (Op::Z1, re(0.5 * g)),
            (Op::Z2, re(0.5 * g)),
            (Op::Raise1Lower2, C64::from_polar(g, phi)),
            (Op::Lower1Raise2, C64::from_polar(g, -phi)),
        ],
    }
}

/// Functional whose expectation is the reflected photon rate for input from `direction`.
pub fn reflection_functional(params: &DeviceParams, direction: Direction) -> ElementFunctional {
    radiated_flux(params, output_phase(params, direction))
}

/// Steady reflected photon rate.
pub fn reflected_rate(solution: &SteadySolution) -> f64 {
    solution
        .expectation(&reflection_functional(&solution.params, solution.direction()))
        .re
}

/// Steady transmitted rate assembled from the forward output operator,
/// including the interference between input and scattered light.
pub fn transmitted_rate_direct(solution: &SteadySolution) -> f64 {
    let p = &solution.params;
    let direction = solution.direction();
    let s = p.gamma.sqrt();
    let theta = p.theta;
    // forward output: e^{iθ} a_in + √γ S with S = w₁σ₋⁽¹⁾ + w₂σ₋⁽²⁾
    let (w1, w2) = match direction {
        Direction::Left => (C64::from_polar(1.0, p.theta_detuned()), re(1.0)),
        Direction::Right => (re(1.0), C64::from_polar(1.0, theta)),
    };
    let scattered = ElementFunctional {
        identity: ZERO,
        terms: vec![(Op::Lower1, w1), (Op::Lower2, w2)],
    };
    let interference = C64::from_polar(s, -theta) * solution.drive_expectation(&scattered);
    let flux = mean_flux(&solution.input, &solution.pulse);
    let radiated = solution
        .expectation(&radiated_flux(p, output_phase(p, direction.reversed())))
        .re;
    flux + 2.0 * interference.re + radiated
}

/// `T = 1 − reflected/F`.
pub fn transmittivity(solution: &SteadySolution) -> Result<f64> {
    let flux = mean_flux(&solution.input, &solution.pulse);
    if flux <= 0.0 {
        return Err(Error::ZeroFlux);
    }
    Ok(1.0 - reflected_rate(solution) / flux)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

/// Transmittivity sums at or below this are treated as zero.
pub const BLOCKED_TOLERANCE: f64 = 1e-12;

/// Rectification metrics from the two transmittivities.
pub fn metrics(t_fwd: f64, t_bwd: f64) -> Result<Metrics> {
    let r1 = t_fwd - t_bwd;
    let sum = t_fwd + t_bwd;
    if sum.abs() <= BLOCKED_TOLERANCE {
        return Err(Error::BothBlocked { r1 });
    }
    let r2 = r1 / sum;
    let r3 = r2.abs();
    Ok(Metrics {
        r1,
        r2,
        r3,
        r4: r3 * t_fwd,
    })
}

/// Rates for one direction of incidence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalResult {
    pub transmittivity: f64,
    pub rate_ref: f64,
    pub rate_trans: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterResult {
    pub t_fwd: f64,
    pub t_bwd: f64,
    pub forward: DirectionalResult,
    pub backward: DirectionalResult,
    pub flux: f64,
    pub r1: f64,
    /// NaN when both directions are blocked.
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub mode: SolverMode,
}

/// Steady solution for one direction, dispatching on the kind of input.
pub fn solve_steady(params: &DeviceParams, input: &InputState, pulse: &PulseSpec) -> Result<SteadySolution> {
    match input.kind {
        InputKind::Coherent(nbar) => solve_coherent(params, nbar, pulse, input.direction),
        _ => solve_steady_fock(&build_hierarchy(params, input, pulse)?),
    }
}

fn steady_direction(params: &DeviceParams, input: &InputState, pulse: &PulseSpec) -> Result<DirectionalResult> {
    let solution = solve_steady(params, input, pulse)?;
    Ok(DirectionalResult {
        transmittivity: transmittivity(&solution)?,
        rate_ref: reflected_rate(&solution),
        rate_trans: transmitted_rate_direct(&solution),
        diagnostics: solution.diagnostics,
    })
}

/// Photon counts reflected over the pulse and the free decay that follows.
pub fn reflected_count(
    params: &DeviceParams,
    input: &InputState,
    pulse: &PulseSpec,
    config: &SolverConfig,
) -> Result<f64> {
    let table = count_table(params, input, pulse, config)?;
    Ok(match &input.kind {
        InputKind::Fock(n) => table.get(*n as usize, *n as usize).re,
        InputKind::Superposition(c) => table.superposition_counts(c),
        InputKind::Coherent(_) => unreachable!("count_table rejects coherent input"),
    })
}

fn time_domain_direction(
    params: &DeviceParams,
    input: &InputState,
    pulse: &PulseSpec,
    config: &SolverConfig,
) -> Result<DirectionalResult> {
    let photons = input.mean_photon_number();
    if photons <= 0.0 {
        return Err(Error::ZeroFlux);
    }
    let counts = reflected_count(params, input, pulse, config)?;
    let flux = mean_flux(input, pulse);
    let rate_ref = counts / pulse.duration();
    Ok(DirectionalResult {
        transmittivity: 1.0 - counts / photons,
        rate_ref,
        rate_trans: flux - rate_ref,
        diagnostics: Diagnostics::default(),
    })
}

/// Both directions and all metrics at one parameter point.
pub fn simulate(params: &DeviceParams, kind: &InputKind, pulse: &PulseSpec, config: &SolverConfig) -> Result<ScatterResult> {
    config.validate()?;
    let left = InputState {
        kind: kind.clone(),
        direction: Direction::Left,
    };
    left.validate()?;
    let right = left.with_direction(Direction::Right);
    let flux = mean_flux(&left, pulse);
    if flux <= 0.0 {
        return Err(Error::ZeroFlux);
    }
    let (forward, backward) = match config.mode {
        SolverMode::SteadyState => (
            steady_direction(params, &left, pulse)?,
            steady_direction(params, &right, pulse)?,
        ),
        SolverMode::TimeDomain => (
            time_domain_direction(params, &left, pulse, config)?,
            time_domain_direction(params, &right, pulse, config)?,
        ),
    };
    let (t_fwd, t_bwd) = (forward.transmittivity, backward.transmittivity);
    let m = match metrics(t_fwd, t_bwd) {
        Ok(m) => m,
        Err(Error::BothBlocked { r1 }) => Metrics {
            r1,
            r2: f64::NAN,
            r3: f64::NAN,
            r4: f64::NAN,
        },
        Err(e) => return Err(e),
    };
    Ok(ScatterResult {
        t_fwd,
        t_bwd,
        forward,
        backward,
        flux,
        r1: m.r1,
        r2: m.r2,
        r3: m.r3,
        r4: m.r4,
        mode: config.mode,
    })
}

/// Time integrals `N_{p,q} = ∫ E_{p,q}[reflected flux] dt` over the pulse and
/// the following free decay, for every pair of Fock levels.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    pub n_max: usize,
    counts: Vec<C64>,
}

impl CountTable {
    pub fn get(&self, p: usize, q: usize) -> C64 {
        self.counts[p * (self.n_max + 1) + q]
    }

    /// `Σ c_p* c_q N_{p,q}` for the superposition `Σ c_n |n⟩`.
    pub fn superposition_counts(&self, c: &[C64]) -> f64 {
        let mut acc = ZERO;
        for (p, cp) in c.iter().enumerate() {
            for (q, cq) in c.iter().enumerate() {
                acc += cp.conj() * cq * self.get(p, q);
            }
        }
        acc.re
    }

    /// Largest magnitude among the `p ≠ q` integrals.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n_max + 1;
        (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| self.get(p, q).norm())
            .fold(0.0, f64::max)
    }
}

/// Reflected count integrals for every pair up to the highest level of `input`.
pub fn count_table(params: &DeviceParams, input: &InputState, pulse: &PulseSpec, config: &SolverConfig) -> Result<CountTable> {
    let hierarchy = build_hierarchy(params, input, pulse)?;
    let options = TimeDomainOptions {
        samples: 2,
        tail: Tail::Auto,
        functionals: vec![reflection_functional(params, input.direction)],
    };
    let trajectory = solve_time_domain(&hierarchy, config, &options)?;
    Ok(CountTable {
        n_max: hierarchy.n_max,
        counts: trajectory.integrals.into_iter().next().unwrap_or_default(),
    })
}

/// Expected counts of a superposition from per-Fock counts: `Σ|c_n|² counts(n)`.
pub fn superposition_counts(coefficients: &[C64], per_fock_counts: &[f64]) -> f64 {
    coefficients
        .iter()
        .zip(per_fock_counts)
        .map(|(c, n)| c.norm_sqr() * n)
        .sum()
}
