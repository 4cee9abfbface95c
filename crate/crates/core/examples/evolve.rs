//! Full and rotating-wave Bogoliubov blocks at one time, and their symplectic defects.

use rwa_fidelity::dynamics::{effective_evolution, evolution, rwa_evolution, OscillatorParams};

fn main() -> rwa_fidelity::Result<()> {
    let p = OscillatorParams::resonant(1.0, 0.2)?;
    let t = 3.0;
    let full = evolution(&p, t)?;
    let rwa = rwa_evolution(&p, t);
    let eff = effective_evolution(&p, t)?;
    println!("full beta:\n{:?}", full.beta);
    println!("rwa alpha:\n{:?}", rwa.alpha);
    println!("effective beta:\n{:?}", eff.beta);
    println!(
        "symplectic defects: full {:.2e}, effective {:.2e}",
        full.symplectic_defect(),
        eff.symplectic_defect()
    );
    Ok(())
}
