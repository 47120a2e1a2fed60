mod common;

use common::*;
use num_complex::Complex64 as C64;
use waveguide_diode::hierarchy::{EquationSet, Frame};
use waveguide_diode::model::{mean_flux, DeviceParams, Direction, InputKind, InputState, PulseSpec};
use waveguide_diode::observables::{reflected_rate, solve_steady, transmitted_rate_direct};
use waveguide_diode::operators::Op;

/// Operator factors in the library's basis order.
const FACTORS: [(char, char); 15] = [
    ('-', '1'),
    ('z', '1'),
    ('1', '-'),
    ('1', 'z'),
    ('z', '-'),
    ('-', 'z'),
    ('+', '-'),
    ('-', '-'),
    ('z', 'z'),
    ('+', '1'),
    ('1', '+'),
    ('z', '+'),
    ('+', 'z'),
    ('-', '+'),
    ('+', '+'),
];

fn check_blocks(params: &DeviceParams, direction: Direction) {
    for (i, op) in Op::ALL.iter().enumerate() {
        assert_eq!(op.factors(), FACTORS[i]);
    }
    let basis = product_basis(&FACTORS);
    let blocks = EquationSet::new(params).blocks_at(3.7, Frame::Carrier, direction);
    let (near, far) = match direction {
        Direction::Left => (0, 1),
        Direction::Right => (1, 0),
    };
    let far_phase = cis(params.theta);
    for (row, f) in FACTORS.iter().enumerate() {
        let x = two(f.0, f.1);
        let rhs = langevin(&x, params.gamma, params.delta, params.theta, params.theta_detuned());

        let atomic = decompose(&rhs.atomic, &basis);
        assert!((atomic[0] - blocks.identity[row]).norm() < 1e-12, "identity row {row}");
        let pairs: [(Vec<C64>, &nalgebra::DMatrix<C64>); 5] = [
            (atomic, &blocks.homogeneous),
            (decompose(&rhs.annihilate[near], &basis), &blocks.annihilate_near),
            (decompose(&(rhs.annihilate[far] * far_phase), &basis), &blocks.annihilate_far),
            (decompose(&rhs.create[near], &basis), &blocks.create_near),
            (decompose(&(rhs.create[far] * far_phase.conj()), &basis), &blocks.create_far),
        ];
        for (k, (expected, matrix)) in pairs.iter().enumerate() {
            if k > 0 {
                assert!(expected[0].norm() < 1e-12, "field term with identity in row {row}");
            }
            for col in 0..15 {
                let d = (expected[col + 1] - matrix[(row, col)]).norm();
                assert!(
                    d < 1e-12,
                    "block {k}, d{} / d{}: expected {} got {}",
                    Op::ALL[row],
                    Op::ALL[col],
                    expected[col + 1],
                    matrix[(row, col)]
                );
            }
        }
    }
}

#[test]
fn equation_table_matches_operator_algebra() {
    for (d, t) in [(0.1, 0.4922), (-0.7, 0.13), (0.0, 0.25), (1.3, 0.81)] {
        for dir in [Direction::Left, Direction::Right] {
            check_blocks(&DeviceParams::new(d, t), dir);
        }
    }
}

#[test]
fn equation_table_with_phase_correction() {
    for dir in [Direction::Left, Direction::Right] {
        check_blocks(&DeviceParams::new(0.4, 0.31).with_delta_mu(0.05), dir);
    }
}

#[test]
fn fock_rates_match_master_equation() {
    let pulse = PulseSpec::square(0.01);
    let xi = pulse.plateau_amplitude().re;
    for (d, t) in [(0.1, 0.4922), (-0.3, 0.21), (0.6, 0.7)] {
        let params = DeviceParams::new(d, t);
        let model = lindblad(params.gamma, params.delta, params.theta);
        for n in 1..=3u32 {
            for dir in [Direction::Left, Direction::Right] {
                let input = InputState::fock(n, dir);
                let sol = solve_steady(&params, &input, &pulse).unwrap();
                let reference = fock_rates(&model, n as usize, xi, dir == Direction::Left);
                let flux = mean_flux(&input, &pulse);
                assert!((flux - reference.flux).abs() < 1e-15);
                let scale = flux.max(1e-3);
                let refl = reflected_rate(&sol);
                assert!(
                    (refl - reference.reflected).abs() < 1e-8 * scale.max(refl.abs()),
                    "n={n} {dir:?} ({d},{t}): {refl} vs {}",
                    reference.reflected
                );
                let trans = transmitted_rate_direct(&sol);
                assert!(
                    (trans - reference.transmitted).abs() < 1e-8 * scale.max(trans.abs()),
                    "n={n} {dir:?}: {trans} vs {}",
                    reference.transmitted
                );
            }
        }
    }
}

#[test]
fn coherent_rates_match_master_equation() {
    let pulse = PulseSpec::square(0.01);
    let xi = pulse.plateau_amplitude().re;
    for (d, t) in [(0.1, 0.4922), (-0.3, 0.21)] {
        let params = DeviceParams::new(d, t);
        let model = lindblad(params.gamma, params.delta, params.theta);
        for nbar in [0.01, 2.0, 150.0] {
            for dir in [Direction::Left, Direction::Right] {
                let sol = solve_steady(&params, &InputState::coherent(nbar, dir), &pulse).unwrap();
                let reference = coherent_rates(&model, nbar.sqrt() * xi, dir == Direction::Left);
                let refl = reflected_rate(&sol);
                let trans = transmitted_rate_direct(&sol);
                let tol = 1e-9 * reference.flux;
                assert!((refl - reference.reflected).abs() < tol, "{nbar} {dir:?}: {refl} vs {}", reference.reflected);
                assert!((trans - reference.transmitted).abs() < tol, "{nbar} {dir:?}: {trans} vs {}", reference.transmitted);
            }
        }
    }
}

#[test]
fn superposition_steady_state_is_the_mixture() {
    let pulse = PulseSpec::square(0.01);
    let params = DeviceParams::new(0.2, 0.45);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs = vec![C64::new(0.0, 0.0), C64::new(amp, 0.0), C64::new(0.0, amp)];
    let sup = solve_steady(&params, &InputState::superposition(coeffs, Direction::Left), &pulse).unwrap();
    let one = solve_steady(&params, &InputState::fock(1, Direction::Left), &pulse).unwrap();
    let two = solve_steady(&params, &InputState::fock(2, Direction::Left), &pulse).unwrap();
    let mixture = 0.5 * (reflected_rate(&one) + reflected_rate(&two));
    assert!((reflected_rate(&sup) - mixture).abs() < 1e-12);
    let _ = InputKind::Fock(0);
}
