//! Deviation of Fock states under the two evolutions against the analytic bound.

use rwa_fidelity::fockoracle::strong_convergence;

fn main() -> rwa_fidelity::Result<()> {
    let ladder = [0.1, 0.05, 0.025];
    for (na, nb) in [(0, 0), (1, 1)] {
        let checks = strong_convergence(na, nb, 1.0, &ladder, 1.0, 20)?;
        for (g, c) in ladder.iter().zip(&checks) {
            println!(
                "|{na},{nb}>, g = {g}: Z = {:.3e}, bound {:.3e}, satisfied {}",
                c.z_exact, c.z_max, c.satisfied
            );
        }
    }
    Ok(())
}
