//! Stability check: critical coupling and normal-mode frequencies along a coupling sweep.

use rwa_fidelity::dynamics::{critical_coupling, normal_mode_frequencies, OscillatorParams};

fn main() -> rwa_fidelity::Result<()> {
    let (wa, wb) = (1.0, 1.2);
    println!(
        "critical equal coupling: {:.6}",
        critical_coupling(&OscillatorParams::equal(wa, wb, 0.0)?)
    );
    for g in [0.1, 0.3, 0.5, 0.6] {
        match OscillatorParams::equal(wa, wb, g).and_then(|p| normal_mode_frequencies(&p)) {
            Ok((kp, km)) => println!("g = {g}: kappa+ = {kp:.6}, kappa- = {km:.6}"),
            Err(e) => println!("g = {g}: {e}"),
        }
    }
    Ok(())
}
