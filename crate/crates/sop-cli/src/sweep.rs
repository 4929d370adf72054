//! Parameter sweeps and CSV output.
//!
//! One sweep varies a single axis (primary power in dB, transmitter count,
//! backhaul reliability, or the primary outage level) over a grid, solving
//! the power allocation and evaluating the requested SOP methods at each
//! point. Rows come out in grid order; per-point failures are recorded in
//! the row instead of aborting the sweep.

use serde::{Deserialize, Serialize};
use sop_core::analytic::{sop_closed_form, sop_quadrature};
use sop_core::model::db_to_linear;
use sop_core::montecarlo::{estimate_sop, McConfig};
use sop_core::power::compute_power_allocation;
use sop_core::SystemParams;

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PtDb,
    K,
    Reliability,
    Phi,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::PtDb => "pt_db",
            Axis::K => "k",
            Axis::Reliability => "reliability",
            Axis::Phi => "phi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Quadrature,
    Montecarlo,
}

/// A fully validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub mc: Option<McConfig>,
}

/// One grid point's results. Method fields are `None` when the method was
/// not requested or failed (in which case `note` says why).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub sop_analytic: Option<f64>,
    pub sop_quadrature: Option<f64>,
    pub sop_mc: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub gamma_s: f64,
    pub feasible: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepMetadata {
    /// Debug rendering of the resolved sweep request.
    pub config_echo: String,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

/// Substitute one axis value into the base scenario.
pub fn apply_axis(base: &SystemParams, axis: Axis, value: f64) -> Result<SystemParams> {
    let mut p = *base;
    match axis {
        Axis::PtDb => p.primary.gamma_t = db_to_linear(value)?,
        Axis::K => p.secondary.k = value as u32,
        Axis::Reliability => p.secondary.reliability = value,
        Axis::Phi => p.primary.phi = value,
    }
    p.validate().map_err(sop_core::Error::Validation)?;
    Ok(p)
}

fn note_append(note: &mut Option<String>, method: &str, err: impl std::fmt::Display) {
    let line = format!("{method}: {err}");
    match note {
        Some(s) => {
            s.push_str("; ");
            s.push_str(&line);
        }
        None => *note = Some(line),
    }
}

/// Run every grid point of a validated sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepResult {
    let rows = spec
        .grid
        .iter()
        .map(|&axis_value| {
            let mut row = SweepRow {
                axis_value,
                sop_analytic: None,
                sop_quadrature: None,
                sop_mc: None,
                ci_low: None,
                ci_high: None,
                gamma_s: 0.0,
                feasible: false,
                note: None,
            };
            let params = match apply_axis(&spec.base, spec.axis, axis_value) {
                Ok(p) => p,
                Err(e) => {
                    note_append(&mut row.note, "params", e);
                    return row;
                }
            };
            let alloc = match compute_power_allocation(&params) {
                Ok(a) => a,
                Err(e) => {
                    note_append(&mut row.note, "power", e);
                    return row;
                }
            };
            row.gamma_s = alloc.gamma_s;
            row.feasible = alloc.feasible;

            for method in &spec.methods {
                match method {
                    Method::Analytic => match sop_closed_form(&params, &alloc) {
                        Ok(bd) => row.sop_analytic = Some(bd.sop),
                        Err(e) => note_append(&mut row.note, "analytic", e),
                    },
                    Method::Quadrature => match sop_quadrature(&params, &alloc) {
                        Ok(v) => row.sop_quadrature = Some(v),
                        Err(e) => note_append(&mut row.note, "quadrature", e),
                    },
                    Method::Montecarlo => {
                        let cfg = spec.mc.expect("validated: mc present when requested");
                        match estimate_sop(&params, &alloc, &cfg) {
                            Ok(est) => {
                                row.sop_mc = Some(est.sop_hat);
                                row.ci_low = Some(est.ci95.0);
                                row.ci_high = Some(est.ci95.1);
                            }
                            Err(e) => note_append(&mut row.note, "montecarlo", e),
                        }
                    }
                }
            }
            row
        })
        .collect();

    SweepResult {
        axis: spec.axis,
        rows,
        metadata: SweepMetadata {
            config_echo: format!("{spec:?}"),
            seed: spec.mc.map(|m| m.seed),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        },
    }
}

fn fmt_cell(v: Option<f64>) -> String {
    // 12 significant digits.
    v.map(|x| format!("{x:.11e}")).unwrap_or_default()
}

/// Serialize a sweep result as CSV. Byte-deterministic for a fixed result:
/// run metadata (timestamp, version) stays out of the stream on purpose.
pub fn emit_csv(result: &SweepResult) -> String {
    let mut out = String::with_capacity(128 * (result.rows.len() + 1));
    out.push_str("axis,axis_value,sop_analytic,sop_quadrature,sop_mc,ci_low,ci_high,gamma_s,feasible\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            result.axis.name(),
            fmt_cell(Some(row.axis_value)),
            fmt_cell(row.sop_analytic),
            fmt_cell(row.sop_quadrature),
            fmt_cell(row.sop_mc),
            fmt_cell(row.ci_low),
            fmt_cell(row.ci_high),
            fmt_cell(Some(row.gamma_s)),
            row.feasible,
        ));
    }
    out
}
