//! Physical parameters of the two-atom diode and descriptions of the input light.
//!
//! All rates are measured in units of the waveguide decay rate `gamma`, which
//! defaults to 1. The left atom (atom 1) is detuned from the pulse carrier by
//! `delta = ω₀ − ω₁`; the right atom (atom 2) is resonant with the carrier.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the norm of superposition coefficients.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Decay rate of each atom into the waveguide.
    pub gamma: f64,
    /// Detuning Δ = ω₀ − ω₁ of the left atom from the carrier.
    pub delta: f64,
    /// Propagation phase θ = ω₀ d / v_g between the atoms, in radians.
    pub theta: f64,
    /// Correction Δ·μ between the phase picked up at ω₁ and at ω₀.
    pub delta_mu: f64,
    /// Evaluate the envelope of far-atom drive terms at the retarded time.
    pub mu_envelope_delay: bool,
    /// Propagation delay μ = d / v_g, used only with `mu_envelope_delay`.
    pub mu: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            delta: 0.0,
            theta: 0.0,
            delta_mu: 0.0,
            mu_envelope_delay: false,
            mu: 0.0,
        }
    }
}

impl DeviceParams {
    /// Parameters in the dimensionless form used on every figure axis: Δ/γ and θ/2π.
    pub fn new(delta_over_gamma: f64, theta_over_2pi: f64) -> Self {
        Self {
            delta: delta_over_gamma,
            theta: theta_over_2pi * TAU,
            ..Self::default()
        }
    }

    pub fn with_delta_mu(mut self, delta_mu: f64) -> Self {
        self.delta_mu = delta_mu;
        self
    }

    pub fn with_envelope_delay(mut self, mu: f64) -> Self {
        self.mu_envelope_delay = true;
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !self.delta.is_finite() || !self.theta.is_finite() || !self.delta_mu.is_finite() {
            return Err(Error::InvalidParameter(
                "delta, theta and delta_mu must be finite".into(),
            ));
        }
        if self.mu_envelope_delay && !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delay mu must be non-negative, got {}",
                self.mu
            )));
        }
        Ok(())
    }

    pub fn theta_over_2pi(&self) -> f64 {
        self.theta / TAU
    }

    pub fn delta_over_gamma(&self) -> f64 {
        self.delta / self.gamma
    }

    /// Phase accumulated between the atoms by light emitted by the detuned atom (ω₁μ).
    pub fn theta_detuned(&self) -> f64 {
        self.theta - self.delta_mu
    }

    /// Δ₁₂ = ω₁ − ω₂. The right atom sits at the carrier, so this is −Δ.
    pub fn detuning_12(&self) -> f64 {
        -self.delta
    }

    /// Retardation applied to drive terms reaching the far atom.
    pub fn envelope_delay(&self) -> f64 {
        if self.mu_envelope_delay {
            self.mu
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    #[default]
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Bandwidth Ω.
    pub omega: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    pub fn square(omega: f64) -> Self {
        Self {
            omega,
            shape: PulseShape::Square,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse bandwidth must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Length of the pulse, 2/Ω for the square envelope.
    pub fn duration(&self) -> f64 {
        match self.shape {
            PulseShape::Square => 2.0 / self.omega,
        }
    }

    /// Envelope value on the flat top of the pulse.
    pub fn plateau_amplitude(&self) -> C64 {
        match self.shape {
            PulseShape::Square => C64::new((self.omega / 2.0).sqrt(), 0.0),
        }
    }
}

/// Temporal mode function ξ(τ) of the pulse.
pub fn envelope(tau: f64, pulse: &PulseSpec) -> C64 {
    match pulse.shape {
        PulseShape::Square => {
            if (0.0..=pulse.duration()).contains(&tau) {
                pulse.plateau_amplitude()
            } else {
                C64::new(0.0, 0.0)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Incident from the left, in the right-moving mode A.
    Left,
    /// Incident from the right, in the left-moving mode B.
    Right,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Fock(u32),
    Coherent(f64),
    /// Amplitudes c_n of Σ c_n |n⟩, starting at n = 0.
    Superposition(Vec<C64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputState {
    pub kind: InputKind,
    pub direction: Direction,
}

impl InputState {
    pub fn fock(n: u32, direction: Direction) -> Self {
        Self {
            kind: InputKind::Fock(n),
            direction,
        }
    }

    pub fn coherent(nbar: f64, direction: Direction) -> Self {
        Self {
            kind: InputKind::Coherent(nbar),
            direction,
        }
    }

    pub fn superposition(coefficients: Vec<C64>, direction: Direction) -> Self {
        Self {
            kind: InputKind::Superposition(coefficients),
            direction,
        }
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        Self {
            kind: self.kind.clone(),
            direction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            InputKind::Fock(_) => Ok(()),
            InputKind::Coherent(nbar) => {
                if *nbar >= 0.0 && nbar.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "mean photon number must be non-negative, got {nbar}"
                    )))
                }
            }
            InputKind::Superposition(c) => {
                if c.is_empty() {
                    return Err(Error::InvalidParameter(
                        "superposition needs at least one coefficient".into(),
                    ));
                }
                let norm: f64 = c.iter().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "superposition coefficients have squared norm {norm}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Highest Fock level carried by the state, `None` for coherent light.
    pub fn max_photons(&self) -> Option<usize> {
        match &self.kind {
            InputKind::Fock(n) => Some(*n as usize),
            InputKind::Coherent(_) => None,
            InputKind::Superposition(c) => Some(c.len() - 1),
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        match &self.kind {
            InputKind::Fock(n) => *n as f64,
            InputKind::Coherent(nbar) => *nbar,
            InputKind::Superposition(c) => c
                .iter()
                .enumerate()
                .map(|(n, c)| n as f64 * c.norm_sqr())
                .sum(),
        }
    }
}

/// Mean photon flux F on the flat top of the pulse.
pub fn mean_flux(input: &InputState, pulse: &PulseSpec) -> f64 {
    input.mean_photon_number() * pulse.plateau_amplitude().norm_sqr()
}
