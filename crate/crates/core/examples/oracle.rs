//! Fock-space propagation compared with the Gaussian route, with cutoff certification.

use rwa_fidelity::dynamics::OscillatorParams;
use rwa_fidelity::fockoracle::{certified_series, InitialState};
use rwa_fidelity::metrics::compare;
use rwa_fidelity::states::squeezed_pair;

fn main() -> rwa_fidelity::Result<()> {
    let p = OscillatorParams::resonant(1.0, 0.05)?;
    let s = 0.2;
    let times = [1.0, 2.5, 5.0];
    let cert = certified_series(&p, InitialState::Squeezed(s), &times, 20)?;
    let state = squeezed_pair(s)?;
    for (o, &t) in cert.results.iter().zip(&times) {
        let c = compare(&state.factor, &p, t)?;
        println!(
            "t = {t}: F oracle {:.12}, F gaussian {:.12}, dN oracle {:.3e}, dN gaussian {:.3e}",
            o.fidelity, c.report.fidelity, o.delta_n, c.delta_n
        );
    }
    println!("cutoff doubling change {:.2e}", cert.doubling_change);
    Ok(())
}
