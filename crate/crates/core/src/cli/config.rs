//! Scan configuration: a single JSON document describing parameters, initial state,
//! dimensionless time grid, requested columns, oracle settings and output.

use serde::{Deserialize, Serialize};

use crate::dynamics::OscillatorParams;
use crate::error::{Error, Result};
use crate::fockoracle::{InitialState, DEFAULT_CUTOFF};
use crate::states::{squeezed_pair, PureState};

/// Initial state of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateConfig {
    Vacuum,
    Squeezed { s: f64 },
}

impl InitialStateConfig {
    /// Squeezing parameter (zero for the vacuum).
    pub fn squeezing(&self) -> f64 {
        match self {
            InitialStateConfig::Vacuum => 0.0,
            InitialStateConfig::Squeezed { s } => *s,
        }
    }

    /// The Gaussian state.
    pub fn gaussian(&self) -> Result<PureState> {
        squeezed_pair(self.squeezing())
    }

    /// The corresponding oracle input.
    pub fn oracle_input(&self) -> InitialState {
        match self {
            InitialStateConfig::Vacuum => InitialState::Vacuum,
            InitialStateConfig::Squeezed { s } => InitialState::Squeezed(*s),
        }
    }
}

/// Uniform grid of dimensionless times `τ = ω_a t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TauGrid {
    /// Checks finiteness, `end > start` and `steps ≥ 2`.
    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Config("tau_grid bounds must be finite".into()));
        }
        if self.end <= self.start {
            return Err(Error::Config(format!(
                "tau_grid.end ({}) must exceed tau_grid.start ({})",
                self.end, self.start
            )));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!(
                "tau_grid.steps must be at least 2, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    /// The grid points, strictly increasing.
    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.end
                } else {
                    self.start + k as f64 * h
                }
            })
            .collect()
    }
}

/// A column that can be requested in the scan output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Fidelity,
    Bures,
    DeltaN,
    RPlus,
    RMinus,
    C2Prediction,
}

impl Quantity {
    /// All quantities in column order.
    pub const ALL: [Quantity; 6] = [
        Quantity::Fidelity,
        Quantity::Bures,
        Quantity::DeltaN,
        Quantity::RPlus,
        Quantity::RMinus,
        Quantity::C2Prediction,
    ];

    /// Column header.
    pub fn header(&self) -> &'static str {
        match self {
            Quantity::Fidelity => "fidelity",
            Quantity::Bures => "bures",
            Quantity::DeltaN => "delta_n",
            Quantity::RPlus => "r_plus",
            Quantity::RMinus => "r_minus",
            Quantity::C2Prediction => "c2_prediction",
        }
    }
}

fn default_outputs() -> Vec<Quantity> {
    Quantity::ALL[..5].to_vec()
}

/// Fock-oracle settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: bool,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            enabled: false,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Complete description of a fidelity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub params: OscillatorParams,
    pub initial_state: InitialStateConfig,
    pub tau_grid: TauGrid,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Quantity>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

impl ScanConfig {
    /// Parses a JSON document; syntax and field errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScanConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    /// Serializes to pretty JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks physical parameters, grid, squeezing, requested columns and oracle settings.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.tau_grid.validate()?;
        self.initial_state.gaussian()?;
        if self.outputs.is_empty() {
            return Err(Error::Config(
                "outputs must request at least one quantity".into(),
            ));
        }
        if self.outputs.contains(&Quantity::C2Prediction) && !self.params.has_equal_couplings() {
            return Err(Error::Config(
                "c2_prediction requires equal couplings g_bs = g_sq".into(),
            ));
        }
        if self.oracle.enabled && self.oracle.cutoff < 1 {
            return Err(Error::Config("oracle.cutoff must be at least 1".into()));
        }
        Ok(())
    }

    /// Requested quantities in canonical column order, without duplicates.
    pub fn columns(&self) -> Vec<Quantity> {
        Quantity::ALL
            .into_iter()
            .filter(|q| self.outputs.contains(q))
            .collect()
    }

    /// Header row: `tau`, the requested quantities, then the oracle columns when enabled.
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["tau"];
        h.extend(self.columns().iter().map(|q| q.header()));
        if self.oracle.enabled {
            h.extend(["fidelity_oracle", "delta_n_oracle"]);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "params": {"omega_a": 1.0, "omega_b": 1.0, "g_bs": 0.05, "g_sq": 0.05},
        "initial_state": {"kind": "squeezed", "s": 0.2},
        "tau_grid": {"start": 0.0, "end": 10.0, "steps": 11},
        "outputs": ["r_minus", "fidelity", "c2_prediction"],
        "oracle": {"enabled": true, "cutoff": 30},
        "format": "json"
    }"#;

    #[test]
    fn parses_and_orders_columns() {
        let cfg = ScanConfig::from_json(EXAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(
            cfg.header(),
            vec![
                "tau",
                "fidelity",
                "r_minus",
                "c2_prediction",
                "fidelity_oracle",
                "delta_n_oracle"
            ]
        );
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.initial_state.squeezing(), 0.2);
    }

    #[test]
    fn defaults_apply() {
        let cfg = ScanConfig::from_json(
            r#"{"params": {"omega_a": 1, "omega_b": 1, "g_bs": 0, "g_sq": 0},
                "initial_state": {"kind": "vacuum"},
                "tau_grid": {"start": 0, "end": 1, "steps": 2}}"#,
        )
        .unwrap();
        assert_eq!(
            cfg.header(),
            vec!["tau", "fidelity", "bures", "delta_n", "r_plus", "r_minus"]
        );
        assert_eq!(cfg.format, Format::Csv);
        assert!(!cfg.oracle.enabled);
        assert_eq!(cfg.oracle.cutoff, DEFAULT_CUTOFF);
    }

    #[test]
    fn round_trip() {
        let cfg = ScanConfig::from_json(EXAMPLE).unwrap();
        let again = ScanConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_unknown_quantity_with_position() {
        let bad = EXAMPLE.replace("r_minus", "entropy");
        let err = ScanConfig::from_json(&bad).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn rejects_bad_grid_and_unstable_params() {
        let mut cfg = ScanConfig::from_json(EXAMPLE).unwrap();
        cfg.tau_grid.steps = 1;
        assert!(cfg.validate().unwrap_err().is_validation());
        cfg.tau_grid.steps = 5;
        cfg.tau_grid.end = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScanConfig::from_json(EXAMPLE).unwrap();
        cfg.params.g_bs = 0.6;
        cfg.params.g_sq = 0.6;
        assert!(matches!(cfg.validate(), Err(Error::Unstable { .. })));
    }

    #[test]
    fn c2_needs_equal_couplings() {
        let mut cfg = ScanConfig::from_json(EXAMPLE).unwrap();
        cfg.params.g_sq = 0.02;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn grid_points() {
        let g = TauGrid {
            start: 0.0,
            end: 1.0,
            steps: 5,
        };
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
