//! Fidelity between Gaussian states from their covariance matrices.

use rwa_fidelity::dynamics::{evolution, rwa_evolution, OscillatorParams};
use rwa_fidelity::metrics::{fidelity_eff, gaussian_fidelity};
use rwa_fidelity::states::{apply_symplectic, squeezed_pair, vacuum, CovarianceMatrix};

fn main() -> rwa_fidelity::Result<()> {
    let squeezed = squeezed_pair(0.4)?;
    println!(
        "vacuum vs squeezed(0.4): {:.6}",
        gaussian_fidelity(&vacuum().covariance, &squeezed.covariance)?
    );
    let thermal = CovarianceMatrix::thermal(2.0)?;
    println!(
        "vacuum vs thermal(nu = 2): {:.6}",
        gaussian_fidelity(&vacuum().covariance, &thermal)?
    );

    let p = OscillatorParams::resonant(1.0, 0.1)?;
    let t = 5.0;
    let full = apply_symplectic(&squeezed.covariance, &evolution(&p, t)?);
    let rwa = apply_symplectic(&squeezed.covariance, &rwa_evolution(&p, t));
    println!(
        "full vs rotating-wave at t = {t}: covariance route {:.12}, effective route {:.12}",
        gaussian_fidelity(&full, &rwa)?,
        fidelity_eff(&squeezed.factor, &p, t)?.fidelity
    );
    Ok(())
}
