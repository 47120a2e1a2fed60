//! Run a small sweep from an inline TOML configuration and print CSV.

use waveguide_diode::sweep::{run_sweep, write_rows, OutputFormat, SweepGrid};

const CONFIG: &str = r#"
schema_version = 1
input = "fock"
n = [1, 2]
omega_over_gamma = [0.01]
delta_over_gamma = { start = -0.2, stop = 0.2, count = 5 }
theta_over_2pi = [0.3]
"#;

fn main() -> waveguide_diode::Result<()> {
    let grid = SweepGrid::from_toml(CONFIG)?;
    let rows = run_sweep(&grid)?;
    write_rows(&rows, OutputFormat::Csv, std::io::stdout().lock())
}
