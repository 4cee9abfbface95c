//! Effective parameters of a parametrically pumped circuit and the collective coupling.

use std::f64::consts::TAU;

use rwa_fidelity::cli::circuit::{circuit_map, collective_coupling, CircuitParams};

fn main() -> rwa_fidelity::Result<()> {
    let mhz = |x: f64| TAU * x * 1e-3;
    let (wa, wb) = (mhz(25.0), mhz(25.0));
    let (ea, eb) = (mhz(5000.0), mhz(7000.0));
    let c = CircuitParams {
        epsilon_a: ea,
        epsilon_b: eb,
        pump_sq_amp: 2.0 * mhz(5.0),
        pump_sq_freq: (ea - wa) + (eb - wb),
        pump_bs_amp: 2.0 * mhz(5.0),
        pump_bs_freq: (eb - wb) - (ea - wa),
        omega_a: wa,
        omega_b: wb,
    };
    let r = circuit_map(&c)?;
    println!("effective params {:?}", r.params);
    println!(
        "critical coupling {:.6}, arbitrary coupling {}",
        r.critical_coupling, r.arbitrary_coupling
    );
    for d in &r.dropped_terms {
        println!(
            "dropped {} term {}: rotates at {:.4}",
            d.pump, d.term, d.frequency
        );
    }
    println!(
        "collective coupling of 100 emitters: {:.4}",
        collective_coupling(100, mhz(0.5))?
    );
    Ok(())
}
