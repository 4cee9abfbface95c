//! Mapping of a parametrically pumped two-oscillator circuit to effective coupled-mode
//! parameters in a doubly rotating frame, and the collective-coupling enhancement.

use serde::{Deserialize, Serialize};

use crate::dynamics::{critical_coupling, OscillatorParams};
use crate::error::{Error, Result};

/// Coupling-to-frequency ratio from which the coupling counts as arbitrary (non-perturbative).
pub const ARBITRARY_COUPLING_RATIO: f64 = 0.1;

/// Lab-frame circuit description. All frequencies are angular.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Lab-frame oscillator frequencies.
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    /// Squeezing pump: amplitude `2g_sq` and frequency.
    pub pump_sq_amp: f64,
    pub pump_sq_freq: f64,
    /// Beam-splitter pump: amplitude `2g_bs` and frequency.
    pub pump_bs_amp: f64,
    pub pump_bs_freq: f64,
    /// Detunings kept in the rotating frame; they become the effective `ω_a`, `ω_b`.
    pub omega_a: f64,
    pub omega_b: f64,
}

/// A lab-frame term that rotates in the chosen frame and is dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DroppedTerm {
    pub pump: &'static str,
    pub term: &'static str,
    /// Residual rotation frequency of the term in the rotating frame.
    pub frequency: f64,
}

/// Effective parameters and frame bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitReport {
    pub params: OscillatorParams,
    /// Rotation frequencies of the frame, `ε − ω`.
    pub frame_a: f64,
    pub frame_b: f64,
    /// `ω_sq − (f_a + f_b)`: zero when the squeezing pump is resonant in the frame.
    pub sq_mismatch: f64,
    /// `ω_bs − |f_a − f_b|`: zero when the beam-splitter pump is resonant in the frame.
    pub bs_mismatch: f64,
    pub dropped_terms: Vec<DroppedTerm>,
    pub critical_coupling: f64,
    /// True when a coupling reaches 10 % of the smaller effective frequency.
    pub arbitrary_coupling: bool,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )));
    }
    Ok(())
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative, got {x}"
        )));
    }
    Ok(())
}

/// Maps the circuit to effective parameters `g_bs = pump_bs_amp/2`, `g_sq = pump_sq_amp/2`
/// with the given detunings, validates stability and lists the dropped rotating terms.
pub fn circuit_map(c: &CircuitParams) -> Result<CircuitReport> {
    positive("epsilon_a", c.epsilon_a)?;
    positive("epsilon_b", c.epsilon_b)?;
    non_negative("pump_sq_amp", c.pump_sq_amp)?;
    non_negative("pump_bs_amp", c.pump_bs_amp)?;
    if c.pump_sq_amp > 0.0 {
        positive("pump_sq_freq", c.pump_sq_freq)?;
    }
    if c.pump_bs_amp > 0.0 {
        positive("pump_bs_freq", c.pump_bs_freq)?;
    }
    let frame_a = c.epsilon_a - c.omega_a;
    let frame_b = c.epsilon_b - c.omega_b;
    positive("frame frequency epsilon_a - omega_a", frame_a)?;
    positive("frame frequency epsilon_b - omega_b", frame_b)?;

    let params = OscillatorParams::new(
        c.omega_a,
        c.omega_b,
        c.pump_bs_amp / 2.0,
        c.pump_sq_amp / 2.0,
    )?;
    let sum = frame_a + frame_b;
    let diff = (frame_a - frame_b).abs();

    let mut dropped = Vec::new();
    let mut push = |pump: &'static str, term: &'static str, frequency: f64| {
        dropped.push(DroppedTerm {
            pump,
            term,
            frequency,
        })
    };
    if c.pump_sq_amp > 0.0 {
        let w = c.pump_sq_freq;
        push(
            "squeezing",
            "a†b† + ab, counter-rotating pump component",
            sum + w,
        );
        push("squeezing", "a†b + ab†, pump difference", (diff - w).abs());
        push("squeezing", "a†b + ab†, pump sum", diff + w);
    }
    if c.pump_bs_amp > 0.0 {
        let w = c.pump_bs_freq;
        push(
            "beam-splitter",
            "a†b† + ab, pump difference",
            (sum - w).abs(),
        );
        push("beam-splitter", "a†b† + ab, pump sum", sum + w);
        push(
            "beam-splitter",
            "a†b + ab†, counter-rotating pump component",
            diff + w,
        );
    }

    let g_max = params.g_bs.max(params.g_sq);
    Ok(CircuitReport {
        params,
        frame_a,
        frame_b,
        sq_mismatch: if c.pump_sq_amp > 0.0 {
            c.pump_sq_freq - sum
        } else {
            0.0
        },
        bs_mismatch: if c.pump_bs_amp > 0.0 {
            c.pump_bs_freq - diff
        } else {
            0.0
        },
        dropped_terms: dropped,
        critical_coupling: critical_coupling(&params),
        arbitrary_coupling: g_max >= ARBITRARY_COUPLING_RATIO * c.omega_a.min(c.omega_b),
    })
}

/// Collective coupling `√N·g` of `N` identical emitters coupled to one mode.
pub fn collective_coupling(n: u64, g_single: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "the number of emitters must be at least 1".into(),
        ));
    }
    Ok((n as f64).sqrt() * g_single)
}
