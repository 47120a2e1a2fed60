//! Integrate the hierarchy through a two-photon pulse and compare the
//! reflected photon count with the steady-state rate.

use waveguide_diode::hierarchy::build_hierarchy;
use waveguide_diode::model::{DeviceParams, Direction, InputState, PulseSpec};
use waveguide_diode::observables::{reflected_rate, reflection_functional};
use waveguide_diode::operators::Op;
use waveguide_diode::solver::{solve_steady_fock, solve_time_domain, SolverConfig, Tail, TimeDomainOptions};

fn main() -> waveguide_diode::Result<()> {
    let params = DeviceParams::new(0.5, 0.3);
    let pulse = PulseSpec::square(0.01);
    let input = InputState::fock(2, Direction::Left);
    let hierarchy = build_hierarchy(&params, &input, &pulse)?;

    let options = TimeDomainOptions {
        samples: 11,
        tail: Tail::Auto,
        functionals: vec![reflection_functional(&params, Direction::Left)],
    };
    let trajectory = solve_time_domain(&hierarchy, &SolverConfig::time_domain(), &options)?;
    for (t, state) in trajectory.times.iter().zip(&trajectory.states) {
        let excitation = 0.5 * (state.get(2, 2, Op::Z1) + state.get(2, 2, Op::Z2)).re + 1.0;
        println!("t = {t:8.2}  atomic excitation = {excitation:.6}");
    }

    let counts = trajectory.integral(0, 2, 2).re;
    let steady = reflected_rate(&solve_steady_fock(&hierarchy)?);
    println!("reflected photons: {counts:.6}");
    println!("steady rate x duration: {:.6}", steady * pulse.duration());
    println!("integrator steps: {}", trajectory.steps);
    Ok(())
}
