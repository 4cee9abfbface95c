//! Fidelity scans over a dimensionless time grid, with CSV or JSON emission.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Format, Quantity, ScanConfig};
use crate::dynamics::time_from_tau;
use crate::error::Result;
use crate::fockoracle::oracle_series;
use crate::metrics::compare;
use crate::perturbation::{c2_inverse_fidelity_sq, PerturbativeRegime, RegimeFlags};

/// Aggregate information printed after a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub min_fidelity: f64,
    pub max_delta_n: f64,
    pub off_resonance: bool,
    pub large_detuning: bool,
    pub long_time: bool,
    /// Largest `|F − F_oracle|` or `|ΔN − ΔN_oracle|`, when the oracle ran.
    pub max_oracle_deviation: Option<f64>,
    /// Cutoff finally used by the oracle.
    pub oracle_cutoff: Option<usize>,
}

impl std::fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rows={} min_fidelity={:.12} max_delta_n={:.6e} off_resonance={} large_detuning={} long_time={}",
            self.rows,
            self.min_fidelity,
            self.max_delta_n,
            self.off_resonance,
            self.large_detuning,
            self.long_time
        )?;
        if let (Some(d), Some(c)) = (self.max_oracle_deviation, self.oracle_cutoff) {
            write!(f, " max_oracle_deviation={d:.3e} oracle_cutoff={c}")?;
        }
        Ok(())
    }
}

/// Scan result: header, rows in grid order and summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub summary: ScanSummary,
}

/// Regime flags of a parameter set at dimensionless time `τ`, using the larger coupling.
pub fn regime_flags(cfg: &ScanConfig, tau: f64) -> RegimeFlags {
    let p = &cfg.params;
    PerturbativeRegime {
        g_tilde: p.g_bs.max(p.g_sq) / p.omega_a,
        epsilon: p.omega_b / p.omega_a - 1.0,
        tau,
        s: cfg.initial_state.squeezing(),
    }
    .flags()
}

/// Evaluates the scan; grid points run in parallel and rows keep grid order.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanOutput> {
    cfg.validate()?;
    let p = cfg.params;
    let state = cfg.initial_state.gaussian()?;
    let taus = cfg.tau_grid.points();
    let columns = cfg.columns();
    let s = cfg.initial_state.squeezing();

    let rows: Vec<(f64, f64, Vec<f64>)> = taus
        .par_iter()
        .map(|&tau| {
            let c = compare(&state.factor, &p, time_from_tau(tau, p.omega_a))?;
            let mut row = vec![tau];
            for q in &columns {
                row.push(match q {
                    Quantity::Fidelity => c.report.fidelity,
                    Quantity::Bures => c.report.bures,
                    Quantity::DeltaN => c.delta_n,
                    Quantity::RPlus => c.report.r_plus,
                    Quantity::RMinus => c.report.r_minus,
                    Quantity::C2Prediction => {
                        let r = PerturbativeRegime::new(
                            p.g_bs / p.omega_a,
                            p.omega_b / p.omega_a - 1.0,
                            tau,
                            s,
                        )?;
                        c2_inverse_fidelity_sq(&r).value.powf(-0.5)
                    }
                });
            }
            Ok((c.report.fidelity, c.delta_n, row))
        })
        .collect::<Result<_>>()?;

    let mut summary = ScanSummary {
        rows: rows.len(),
        min_fidelity: rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        max_delta_n: rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
        off_resonance: false,
        large_detuning: false,
        long_time: false,
        max_oracle_deviation: None,
        oracle_cutoff: None,
    };
    for &tau in &taus {
        let f = regime_flags(cfg, tau);
        summary.off_resonance |= f.off_resonance;
        summary.large_detuning |= f.large_detuning;
        summary.long_time |= f.long_time;
    }

    let mut out_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.2.clone()).collect();
    if cfg.oracle.enabled {
        let times: Vec<f64> = taus.iter().map(|&t| time_from_tau(t, p.omega_a)).collect();
        let oracle = oracle_series(
            &p,
            cfg.initial_state.oracle_input(),
            &times,
            cfg.oracle.cutoff,
        )?;
        let mut dev: f64 = 0.0;
        for ((row, exact), o) in out_rows.iter_mut().zip(&rows).zip(&oracle) {
            row.push(o.fidelity);
            row.push(o.delta_n);
            dev = dev
                .max((exact.0 - o.fidelity).abs())
                .max((exact.1 - o.delta_n).abs());
        }
        summary.max_oracle_deviation = Some(dev);
        summary.oracle_cutoff = oracle.first().map(|o| o.cutoff);
    }

    Ok(ScanOutput {
        columns: cfg.header(),
        rows: out_rows,
        summary,
    })
}

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the rows as CSV with a header line.
pub fn write_csv<W: Write>(out: &ScanOutput, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(&out.columns)?;
    for row in &out.rows {
        wr.write_record(row.iter().map(|&x| format_value(x)))?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes `{"columns": [...], "rows": [[...]], "summary": {...}}`.
pub fn write_json<W: Write>(out: &ScanOutput, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, out)?;
    writeln!(w)?;
    Ok(())
}

/// Writes the output in the requested format.
pub fn write_output<W: Write>(out: &ScanOutput, format: Format, w: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, w),
        Format::Json => write_json(out, w),
    }
}
