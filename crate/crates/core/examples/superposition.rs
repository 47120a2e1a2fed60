//! Photon counts for a superposition of Fock states equal the weighted
//! mixture of the Fock counts: cross terms between Fock levels vanish.

use num_complex::Complex64 as C64;
use waveguide_diode::model::{DeviceParams, Direction, InputState, PulseSpec};
use waveguide_diode::observables::count_table;
use waveguide_diode::solver::SolverConfig;

fn main() -> waveguide_diode::Result<()> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let c = vec![C64::new(a, 0.0), C64::new(0.0, a)];
    let input = InputState::superposition(c.clone(), Direction::Left);
    let table = count_table(
        &DeviceParams::new(0.4, 0.2),
        &input,
        &PulseSpec::square(0.01),
        &SolverConfig::time_domain(),
    )?;
    for p in 0..=1 {
        for q in 0..=1 {
            println!("N[{p},{q}] = {:.3e}", table.get(p, q));
        }
    }
    println!("superposition counts: {:.10}", table.superposition_counts(&c));
    println!("mixture counts:       {:.10}", 0.5 * (table.get(0, 0).re + table.get(1, 1).re));
    Ok(())
}
