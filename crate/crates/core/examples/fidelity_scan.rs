//! Fidelity scan over a dimensionless time grid written as CSV to stdout.

use rwa_fidelity::cli::config::{
    Format, InitialStateConfig, OracleConfig, Quantity, ScanConfig, TauGrid,
};
use rwa_fidelity::cli::scan::{run_scan, write_output};
use rwa_fidelity::dynamics::OscillatorParams;

fn main() -> rwa_fidelity::Result<()> {
    let cfg = ScanConfig {
        params: OscillatorParams::resonant(1.0, 0.05)?,
        initial_state: InitialStateConfig::Squeezed { s: 0.2 },
        tau_grid: TauGrid {
            start: 0.0,
            end: 20.0,
            steps: 11,
        },
        outputs: Quantity::ALL.to_vec(),
        oracle: OracleConfig::default(),
        output_path: None,
        format: Format::Csv,
    };
    let out = run_scan(&cfg)?;
    write_output(&out, cfg.format, std::io::stdout().lock())?;
    eprintln!("{}", out.summary);
    Ok(())
}
