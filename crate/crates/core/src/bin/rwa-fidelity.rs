//! Command-line entry point.

fn main() {
    std::process::exit(rwa_fidelity::cli::run(std::env::args_os()));
}
