//! Transmittivities and rectification metrics at one device point, for Fock
//! and coherent pulses.

use waveguide_diode::model::{DeviceParams, InputKind, PulseSpec};
use waveguide_diode::observables::simulate;
use waveguide_diode::solver::SolverConfig;

fn main() -> waveguide_diode::Result<()> {
    let params = DeviceParams::new(0.13, 0.49);
    let pulse = PulseSpec::square(0.01);
    let config = SolverConfig::default();

    println!("{:<14} {:>10} {:>10} {:>10} {:>10}", "input", "T_fwd", "T_bwd", "R1", "R4");
    for kind in [
        InputKind::Fock(1),
        InputKind::Fock(2),
        InputKind::Coherent(0.5),
        InputKind::Coherent(2.0),
        InputKind::Coherent(20.0),
    ] {
        let r = simulate(&params, &kind, &pulse, &config)?;
        println!(
            "{:<14} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            format!("{kind:?}"),
            r.t_fwd,
            r.t_bwd,
            r.r1,
            r.r4
        );
    }
    Ok(())
}
