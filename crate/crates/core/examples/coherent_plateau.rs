//! Rectification of coherent pulses as the mean photon flux grows.

use waveguide_diode::model::{DeviceParams, InputKind, PulseSpec};
use waveguide_diode::observables::simulate;
use waveguide_diode::solver::SolverConfig;

fn main() -> waveguide_diode::Result<()> {
    let params = DeviceParams::new(0.13, 0.49);
    let pulse = PulseSpec::square(0.01);
    println!("{:>10} {:>12} {:>10}", "nbar", "F/gamma", "R1");
    for k in 0..=16 {
        let nbar = 2e-2 * 10f64.powf(k as f64 / 4.0);
        let r = simulate(&params, &InputKind::Coherent(nbar), &pulse, &SolverConfig::default())?;
        println!("{nbar:>10.3} {:>12.3e} {:>10.4}", r.flux, r.r1);
    }
    Ok(())
}
