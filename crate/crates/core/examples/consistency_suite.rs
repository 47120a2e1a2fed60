//! Run the consistency suite, then again with a deliberately broken
//! hierarchy to show that the oracle comparison notices.

use waveguide_diode::oracle::{default_points, run_consistency_suite, SuiteOptions};

fn main() {
    let points = default_points();
    let report = run_consistency_suite(&points, &SuiteOptions::default());
    println!("{} checks, all passed: {}", report.checks.len(), report.passed);

    let mut broken = SuiteOptions::default();
    broken.build.theta_sign_fault = true;
    let report = run_consistency_suite(&points[..2], &broken);
    for c in report.failures() {
        println!("detected: {} at {:?} (deviation {:.3})", c.check, c.point, c.value);
    }
}
