//! Exact versus lowest-order vacuum fidelity on a coupling ladder, with fitted orders.

use rwa_fidelity::perturbation::{
    c2_inverse_fidelity_sq, convergence_order, exact_fidelity, vacuum_perturbative_fidelity,
    PerturbativeRegime,
};

fn main() -> rwa_fidelity::Result<()> {
    let tau = 2.0;
    let mut infidelity = Vec::new();
    let mut residual = Vec::new();
    for g in [0.1, 0.05, 0.025] {
        let r = PerturbativeRegime::resonant(g, tau, 0.0)?;
        let exact = exact_fidelity(&r)?;
        let approx = vacuum_perturbative_fidelity(&r).value;
        println!("g = {g}: exact {exact:.12}, second order {approx:.12}");
        infidelity.push((g, 1.0 - exact));
        residual.push((g, (exact - approx).abs()));
    }
    println!("infidelity order {:.3}", convergence_order(&infidelity)?);
    println!("residual order {:.3}", convergence_order(&residual)?);

    let r = PerturbativeRegime::resonant(0.05, 7.0, 0.1)?;
    println!(
        "squeezed s = 0.1, tau = 7: exact F^-2 {:.10}, 1 + C2 g^2 {:.10}",
        exact_fidelity(&r)?.powi(-2),
        c2_inverse_fidelity_sq(&r).value
    );
    Ok(())
}
