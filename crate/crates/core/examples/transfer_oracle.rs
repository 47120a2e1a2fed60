//! Compare the single-photon hierarchy with transfer-matrix scattering, both
//! for a monochromatic photon and for a finite square pulse.

use waveguide_diode::model::{DeviceParams, Direction, InputKind, InputState, PulseSpec};
use waveguide_diode::observables::{reflected_count, simulate};
use waveguide_diode::oracle::{pulse_averaged_transmission, single_photon_amplitudes, TransferOracleParams};
use waveguide_diode::solver::SolverConfig;

fn main() -> waveguide_diode::Result<()> {
    let narrow = PulseSpec::square(1e-5);
    let pulse = PulseSpec::square(0.05);
    println!(
        "{:>7} {:>7} {:>12} {:>12} {:>12} {:>12}",
        "delta", "theta", "|t|^2", "hierarchy", "pulse avg", "counts"
    );
    for (d, t) in [(0.5, 0.3), (-0.2, 0.15), (1.0, 0.1), (0.3, 0.7)] {
        let params = DeviceParams::new(d, t);
        let (amp, _) = single_photon_amplitudes(&TransferOracleParams::at_carrier(&params));
        let steady = simulate(&params, &InputKind::Fock(1), &narrow, &SolverConfig::default())?;
        let averaged = pulse_averaged_transmission(&params, pulse.omega);
        let counted = 1.0
            - reflected_count(
                &params,
                &InputState::fock(1, Direction::Left),
                &pulse,
                &SolverConfig::time_domain(),
            )?;
        println!(
            "{d:>7.2} {t:>7.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            amp.norm_sqr(),
            steady.t_fwd,
            averaged,
            counted
        );
    }
    Ok(())
}
