//! Build the Fock-state hierarchy for a three-photon pulse, solve it level by
//! level and inspect a few matrix elements.

use waveguide_diode::hierarchy::{build_hierarchy, residual_time_dependence};
use waveguide_diode::model::{DeviceParams, Direction, InputState, PulseSpec};
use waveguide_diode::operators::Op;
use waveguide_diode::solver::solve_steady_fock;

fn main() -> waveguide_diode::Result<()> {
    let params = DeviceParams::new(0.5, 0.3);
    let input = InputState::fock(3, Direction::Left);
    let hierarchy = build_hierarchy(&params, &input, &PulseSpec::square(0.01))?;

    for level in &hierarchy.levels {
        println!("level {}: pairs {:?}", level.level, level.pairs);
    }
    println!("residual time dependence: {:.1e}", residual_time_dependence(&hierarchy));

    let solution = solve_steady_fock(&hierarchy)?;
    let state = solution.state().expect("Fock input");
    println!("diagnostics: {:?}", solution.diagnostics);
    for (p, q) in [(3, 3), (2, 3), (3, 2)] {
        for op in [Op::Z1, Op::Z2, Op::Lower1, Op::Raise1Lower2] {
            println!("E[{p},{q}][{op}] = {:.6}", state.get(p, q, op));
        }
    }
    Ok(())
}
