fn main() {
    std::process::exit(waveguide_diode::cli::cli_main(std::env::args_os()));
}
