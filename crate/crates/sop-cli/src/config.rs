//! JSON scenario configuration.
//!
//! Every dB-valued field carries an explicit `_db` suffix so units can
//! never be confused, and unknown keys are rejected to catch typos like
//! `lamda_sd`. `gamma_t_db` and `pt_db` are aliases (noise power is
//! normalized to one); exactly one of them must be present.

use serde::{Deserialize, Serialize};
use sop_core::model::{db_to_linear, ChannelMeans, PrimaryParams, SecondaryParams};
use sop_core::montecarlo::McConfig;
use sop_core::SystemParams;

use crate::sweep::{Axis, Method, SweepSpec};
use crate::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub primary: PrimaryConfig,
    pub secondary: SecondaryConfig,
    pub channels: ChannelsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimaryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_t_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pt_db: Option<f64>,
    pub beta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondaryConfig {
    pub k: u32,
    pub reliability: f64,
    pub r_th: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelsConfig {
    pub lambda_tr_db: f64,
    pub lambda_td_db: f64,
    pub lambda_te_db: f64,
    pub lambda_sr_db: f64,
    pub lambda_sd_db: f64,
    pub lambda_se_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u64>,
}

impl McSection {
    pub fn to_mc_config(&self) -> McConfig {
        let cfg = McConfig::new(self.trials, self.seed);
        match self.batch_size {
            Some(b) => cfg.with_batch_size(b),
            None => cfg,
        }
    }
}

/// A parsed scenario: validated parameters plus the optional Monte Carlo
/// section, before any sweep is attached.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: SystemParams,
    pub mc: Option<McConfig>,
    pub sweep: Option<SweepConfig>,
}

/// Parse and validate a scenario document (for `eval`; the sweep block is
/// allowed but not required).
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;

    let pt_db = match (file.primary.gamma_t_db, file.primary.pt_db) {
        (Some(v), None) | (None, Some(v)) => v,
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "primary: give either gamma_t_db or pt_db, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "primary: one of gamma_t_db or pt_db is required".into(),
            ))
        }
    };

    let params = SystemParams {
        primary: PrimaryParams {
            gamma_t: db_to_linear(pt_db)?,
            beta: file.primary.beta,
            phi: file.primary.phi,
        },
        secondary: SecondaryParams {
            k: file.secondary.k,
            reliability: file.secondary.reliability,
            r_th: file.secondary.r_th,
        },
        channels: ChannelMeans::from_db(
            file.channels.lambda_tr_db,
            file.channels.lambda_td_db,
            file.channels.lambda_te_db,
            file.channels.lambda_sr_db,
            file.channels.lambda_sd_db,
            file.channels.lambda_se_db,
        )?,
    };
    params.validate().map_err(sop_core::Error::Validation)?;

    Ok(Scenario {
        params,
        mc: file.mc.as_ref().map(McSection::to_mc_config),
        sweep: file.sweep,
    })
}

/// Parse a sweep document into a validated [`SweepSpec`].
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let scenario = parse_scenario(text)?;
    let sweep = scenario
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep: section is required for sweeping".into()))?;

    if sweep.grid.is_empty() {
        return Err(CliError::Config("sweep.grid: must not be empty".into()));
    }
    if sweep.grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Config(
            "sweep.grid: values must be strictly increasing".into(),
        ));
    }
    for &v in &sweep.grid {
        validate_axis_value(sweep.axis, v)?;
    }
    if sweep.methods.contains(&Method::Montecarlo) && scenario.mc.is_none() {
        return Err(CliError::Config(
            "mc: section is required when methods include \"montecarlo\"".into(),
        ));
    }

    Ok(SweepSpec {
        base: scenario.params,
        axis: sweep.axis,
        grid: sweep.grid,
        methods: sweep.methods,
        mc: scenario.mc,
    })
}

fn validate_axis_value(axis: Axis, v: f64) -> Result<()> {
    match axis {
        Axis::PtDb => {
            if !v.is_finite() {
                return Err(CliError::Config(format!(
                    "sweep.grid: pt_db values must be finite, got {v}"
                )));
            }
        }
        Axis::K => {
            if v.fract() != 0.0 || !(1.0..=sop_core::model::MAX_TRANSMITTERS as f64).contains(&v) {
                return Err(CliError::Config(format!(
                    "sweep.grid: k values must be integers in 1..={}, got {v}",
                    sop_core::model::MAX_TRANSMITTERS
                )));
            }
        }
        Axis::Reliability => {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Config(format!(
                    "sweep.grid: reliability values must lie in [0, 1], got {v}"
                )));
            }
        }
        Axis::Phi => {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Config(format!(
                    "sweep.grid: phi values must lie strictly inside (0, 1), got {v}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline_json() -> String {
        r#"{
            "primary": { "pt_db": 10.0, "beta": 0.5, "phi": 0.1 },
            "secondary": { "k": 6, "reliability": 0.99, "r_th": 0.5 },
            "channels": {
                "lambda_tr_db": 3.0, "lambda_td_db": -6.0, "lambda_te_db": 6.0,
                "lambda_sr_db": -3.0, "lambda_sd_db": 3.0, "lambda_se_db": -3.0
            },
            "sweep": { "axis": "pt_db", "grid": [0.0, 10.0, 20.0], "methods": ["analytic", "quadrature"] }
        }"#
        .to_string()
    }

    #[test]
    fn baseline_config_parses() {
        let spec = parse_config(&baseline_json()).unwrap();
        assert_eq!(spec.base.secondary.k, 6);
        assert_eq!(spec.base.secondary.reliability, 0.99);
        assert_eq!(spec.base.primary.phi, 0.1);
        assert_eq!(spec.grid.len(), 3);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = baseline_json().replace("lambda_sd_db", "lamda_sd_db");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lamda_sd_db"), "message was: {msg}");
    }

    #[test]
    fn out_of_range_phi_names_the_field() {
        let text = baseline_json().replace("\"phi\": 0.1", "\"phi\": 1.5");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("primary.phi"), "message was: {msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn gamma_t_db_alias_works_but_not_both() {
        let text = baseline_json().replace("\"pt_db\": 10.0", "\"gamma_t_db\": 10.0");
        assert!(parse_config(&text).is_ok());
        let text = baseline_json().replace("\"pt_db\": 10.0", "\"pt_db\": 10.0, \"gamma_t_db\": 9.0");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn non_increasing_grid_is_rejected() {
        let text = baseline_json().replace("[0.0, 10.0, 20.0]", "[0.0, 10.0, 10.0]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn fractional_k_grid_is_rejected() {
        let text = baseline_json()
            .replace("\"axis\": \"pt_db\"", "\"axis\": \"k\"")
            .replace("[0.0, 10.0, 20.0]", "[2.0, 4.5, 6.0]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn montecarlo_method_requires_mc_section() {
        let text = baseline_json().replace(
            "[\"analytic\", \"quadrature\"]",
            "[\"analytic\", \"montecarlo\"]",
        );
        assert!(parse_config(&text).is_err());
        let with_mc = text.replace(
            "\"sweep\":",
            "\"mc\": { \"trials\": 1000, \"seed\": 42 }, \"sweep\":",
        );
        assert!(parse_config(&with_mc).is_ok());
    }

    #[test]
    fn scenario_without_sweep_is_fine_for_eval() {
        let mut v: serde_json::Value = serde_json::from_str(&baseline_json()).unwrap();
        v.as_object_mut().unwrap().remove("sweep");
        let scenario = parse_scenario(&v.to_string()).unwrap();
        assert!(scenario.sweep.is_none());
        assert!(parse_config(&v.to_string()).is_err());
    }
}
