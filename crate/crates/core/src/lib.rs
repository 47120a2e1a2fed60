//! Two-atom waveguide diode: quantum dynamics of two two-level atoms side
//! coupled to a bidirectional waveguide and driven by Fock, coherent or
//! superposition pulses.

pub mod cli;
pub mod error;
pub mod hierarchy;
pub mod integrator;
pub mod model;
pub mod observables;
pub mod operators;
pub mod oracle;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{DeviceParams, Direction, InputKind, InputState, PulseSpec};
pub use operators::Op;
