//! Secondary transmit power under the primary outage constraint.
//!
//! The secondary transmit SNR is chosen so that the primary receiver's
//! outage probability P[Γ_R < Γ_0] equals the tolerated level Φ exactly
//! (the maximum allowed power). Inverting the Γ_R CDF gives
//!
//! ```text
//! ξ   = 1/(λ_tr Γ_0) * [ exp(-λ_tr Γ_0 / Γ_T) / (1 - Φ) - 1 ]
//! Γ_S = Γ_T λ_sr ξ      if ξ > 0, else 0 (secondary stays silent)
//! ```
//!
//! ξ <= 0 means the primary link misses Φ even with zero interference, so
//! no secondary power is admissible.

use crate::error::{Error, Result};
use crate::model::{PrimaryParams, SystemParams};

/// Solved secondary transmit SNR and the intermediate ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    /// Dimensionless intermediate; negative or zero in the infeasible regime.
    pub xi: f64,
    /// Secondary transmit SNR; zero iff infeasible.
    pub gamma_s: f64,
    /// True iff xi > 0.
    pub feasible: bool,
}

/// ξ from the primary parameters and the T→R channel rate. May be negative
/// or zero; Φ < 1 guarantees there is no division by zero.
pub fn compute_xi(primary: &PrimaryParams, lambda_tr: f64) -> f64 {
    let gamma_zero = primary.gamma_zero();
    let num = (-lambda_tr * gamma_zero / primary.gamma_t).exp() / (1.0 - primary.phi) - 1.0;
    num / (lambda_tr * gamma_zero)
}

/// Solve the power allocation for a validated scenario. Infeasibility is a
/// value (`gamma_s = 0`), not an error.
pub fn compute_power_allocation(params: &SystemParams) -> Result<PowerAllocation> {
    params.validate().map_err(Error::Validation)?;
    let xi = compute_xi(&params.primary, params.channels.lambda_tr);
    if xi > 0.0 {
        Ok(PowerAllocation {
            xi,
            gamma_s: params.primary.gamma_t * params.channels.lambda_sr * xi,
            feasible: true,
        })
    } else {
        Ok(PowerAllocation {
            xi,
            gamma_s: 0.0,
            feasible: false,
        })
    }
}

/// CDF of the primary receiver SINR Γ_R = Γ_T |h_TR|² / (Γ_S |h_SR|² + 1):
///
/// ```text
/// F_R(x) = 1 - (w / (x + w)) exp(-λ_tr x / Γ_T),   w = λ_sr Γ_T / (λ_tr Γ_S)
/// ```
///
/// `gamma_s = 0` is a domain error: with no interference Γ_R is a plain
/// scaled exponential and this expression does not apply.
pub fn cdf_gamma_r(x: f64, gamma_t: f64, gamma_s: f64, lambda_tr: f64, lambda_sr: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("SINR threshold must be >= 0, got {x}")));
    }
    if !(gamma_s > 0.0) {
        return Err(Error::Domain(
            "cdf_gamma_r requires gamma_s > 0; the interference-free case is a plain exponential ratio".into(),
        ));
    }
    if !(gamma_t > 0.0 && lambda_tr > 0.0 && lambda_sr > 0.0) {
        return Err(Error::Domain(
            "cdf_gamma_r requires positive gamma_t, lambda_tr, lambda_sr".into(),
        ));
    }
    let w = lambda_sr * gamma_t / (lambda_tr * gamma_s);
    let f = 1.0 - w / (x + w) * (-lambda_tr * x / gamma_t).exp();
    Ok(f.clamp(0.0, 1.0))
}
