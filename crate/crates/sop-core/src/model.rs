//! Scenario description: primary link, secondary small cells, channel means.
//!
//! Noise power is normalized to one everywhere, so transmit powers are
//! carried as SNRs (the formulas only ever use the ratios). Channel power
//! gains are exponentially distributed; the lambda values are their *rate*
//! parameters, given in dB in the literature and converted here via
//! 10^(dB/10), so the mean gain of a link is 1/lambda.

use crate::error::{Error, Result, ValidationErrors};

/// Largest supported number of small-cell transmitters. The selected-link
/// CDF is an alternating binomial sum; past K = 64 even the double-double
/// evaluation cannot absorb the cancellation.
pub const MAX_TRANSMITTERS: u32 = 64;

/// dB to linear scale: 10^(db/10).
pub fn db_to_linear(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::Domain(format!("dB value must be finite, got {db}")));
    }
    Ok(10f64.powf(db / 10.0))
}

/// Linear to dB scale; requires a strictly positive value.
pub fn linear_to_db(lin: f64) -> Result<f64> {
    if !(lin > 0.0 && lin.is_finite()) {
        return Err(Error::Domain(format!(
            "linear value must be finite and positive, got {lin}"
        )));
    }
    Ok(10.0 * lin.log10())
}

/// Exponential rate parameters of the six channel power gains
/// (T→R, T→D, T→E, S→R, S→D, S→E), linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMeans {
    pub lambda_tr: f64,
    pub lambda_td: f64,
    pub lambda_te: f64,
    pub lambda_sr: f64,
    pub lambda_sd: f64,
    pub lambda_se: f64,
}

impl ChannelMeans {
    /// Build from dB-valued rates, in the same field order as the struct.
    pub fn from_db(
        tr_db: f64,
        td_db: f64,
        te_db: f64,
        sr_db: f64,
        sd_db: f64,
        se_db: f64,
    ) -> Result<Self> {
        Ok(ChannelMeans {
            lambda_tr: db_to_linear(tr_db)?,
            lambda_td: db_to_linear(td_db)?,
            lambda_te: db_to_linear(te_db)?,
            lambda_sr: db_to_linear(sr_db)?,
            lambda_sd: db_to_linear(sd_db)?,
            lambda_se: db_to_linear(se_db)?,
        })
    }

    fn validate_into(&self, errs: &mut ValidationErrors) {
        for (name, v) in [
            ("channels.lambda_tr", self.lambda_tr),
            ("channels.lambda_td", self.lambda_td),
            ("channels.lambda_te", self.lambda_te),
            ("channels.lambda_sr", self.lambda_sr),
            ("channels.lambda_sd", self.lambda_sd),
            ("channels.lambda_se", self.lambda_se),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(name, format!("must be finite and strictly positive, got {v}"));
            }
        }
    }
}

/// Primary network: transmit SNR, target rate, tolerated outage level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryParams {
    /// Transmit SNR of the primary transmitter (linear).
    pub gamma_t: f64,
    /// Target rate beta in bits/s/Hz.
    pub beta: f64,
    /// Tolerated outage probability, strictly inside (0, 1).
    pub phi: f64,
}

impl PrimaryParams {
    pub fn from_pt_db(pt_db: f64, beta: f64, phi: f64) -> Result<Self> {
        Ok(PrimaryParams {
            gamma_t: db_to_linear(pt_db)?,
            beta,
            phi,
        })
    }

    /// Outage SINR threshold 2^beta - 1.
    pub fn gamma_zero(&self) -> f64 {
        self.beta.exp2() - 1.0
    }

    fn validate_into(&self, errs: &mut ValidationErrors) {
        if !(self.gamma_t > 0.0 && self.gamma_t.is_finite()) {
            errs.push("primary.gamma_t", format!("must be finite and strictly positive, got {}", self.gamma_t));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            errs.push("primary.beta", format!("must be finite and strictly positive, got {}", self.beta));
        }
        if !(self.phi > 0.0) {
            errs.push("primary.phi", "phi must be strictly greater than 0");
        }
        if !(self.phi < 1.0) {
            errs.push("primary.phi", "phi must be strictly less than 1");
        }
        if !self.phi.is_finite() {
            errs.push("primary.phi", format!("must be finite, got {}", self.phi));
        }
    }
}

/// Secondary network: transmitter count, backhaul reliability, secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryParams {
    /// Number of small-cell transmitters (1..=64).
    pub k: u32,
    /// Backhaul success probability; 0 and 1 are accepted as degenerate
    /// but well-defined (certain failure / perfect backhaul).
    pub reliability: f64,
    /// Secrecy target rate R_th in bits/s/Hz.
    pub r_th: f64,
}

impl SecondaryParams {
    fn validate_into(&self, errs: &mut ValidationErrors) {
        if self.k < 1 {
            errs.push("secondary.k", "must be at least 1 (selection over an empty set is undefined)");
        }
        if self.k > MAX_TRANSMITTERS {
            errs.push(
                "secondary.k",
                format!("must be at most {MAX_TRANSMITTERS}, got {}", self.k),
            );
        }
        if !(self.reliability >= 0.0 && self.reliability <= 1.0) {
            errs.push("secondary.reliability", format!("must lie in [0, 1], got {}", self.reliability));
        }
        if !(self.r_th > 0.0 && self.r_th.is_finite()) {
            errs.push("secondary.r_th", format!("must be finite and strictly positive, got {}", self.r_th));
        }
    }
}

/// Complete scenario: the single input to everything downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub primary: PrimaryParams,
    pub secondary: SecondaryParams,
    pub channels: ChannelMeans,
}

impl SystemParams {
    /// Check every invariant, reporting all violations at once.
    pub fn validate(&self) -> std::result::Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        self.primary.validate_into(&mut errs);
        self.secondary.validate_into(&mut errs);
        self.channels.validate_into(&mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Consuming form of [`validate`](Self::validate).
    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::Validation)?;
        Ok(self)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn baseline() -> SystemParams {
        SystemParams {
            primary: PrimaryParams::from_pt_db(10.0, 0.5, 0.1).unwrap(),
            secondary: SecondaryParams {
                k: 6,
                reliability: 0.99,
                r_th: 0.5,
            },
            channels: ChannelMeans::from_db(3.0, -6.0, 6.0, -3.0, 3.0, -3.0).unwrap(),
        }
    }

    #[test]
    fn db_conversion_known_values() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        // 10^0.3 and 10^-0.6, mpmath 50 digits.
        assert!((db_to_linear(3.0).unwrap() - 1.9952623149688796014).abs() < 1e-14);
        assert!((db_to_linear(-6.0).unwrap() - 0.25118864315095801111).abs() < 1e-15);
    }

    #[test]
    fn db_conversion_rejects_non_finite() {
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn gamma_zero_of_half_bit() {
        let p = PrimaryParams::from_pt_db(10.0, 0.5, 0.1).unwrap();
        let expected = 0.4142135623730950488; // mpmath
        assert!(((p.gamma_zero() - expected) / expected).abs() < 1e-15);
    }

    #[test]
    fn baseline_is_accepted() {
        assert!(baseline().validate().is_ok());
    }

    #[test]
    fn degenerate_reliability_is_accepted() {
        let mut p = baseline();
        p.secondary.reliability = 0.0;
        assert!(p.validate().is_ok());
        p.secondary.reliability = 1.0;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn phi_boundaries_are_rejected() {
        let mut p = baseline();
        p.primary.phi = 1.0;
        let errs = p.validate().unwrap_err();
        assert!(errs.to_string().contains("primary.phi"));
        assert!(errs.to_string().contains("strictly less than 1"));

        p.primary.phi = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn k_bounds_are_rejected() {
        let mut p = baseline();
        p.secondary.k = 0;
        assert!(p.validate().is_err());
        p.secondary.k = 65;
        assert!(p.validate().is_err());
        p.secondary.k = 64;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn violations_accumulate() {
        let mut p = baseline();
        p.primary.phi = 1.5;
        p.secondary.k = 0;
        p.channels.lambda_sr = -2.0;
        let errs = p.validate().unwrap_err();
        let fields: Vec<&str> = errs.violations.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"primary.phi"));
        assert!(fields.contains(&"secondary.k"));
        assert!(fields.contains(&"channels.lambda_sr"));
    }

    #[test]
    fn validate_is_idempotent() {
        let p = baseline();
        let v1 = p.validated().unwrap();
        let v2 = v1.validated().unwrap();
        assert_eq!(v1, v2);
        assert_eq!(v2, p);
    }

    proptest! {
        #[test]
        fn db_to_linear_round_trips(db in -100.0f64..100.0) {
            let lin = db_to_linear(db).unwrap();
            let back = linear_to_db(lin).unwrap();
            let rel = if db == 0.0 { back.abs() } else { ((back - db) / db).abs() };
            prop_assert!(rel <= 1e-12);
        }

        #[test]
        fn db_to_linear_is_multiplicative(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let lhs = db_to_linear(a).unwrap() * db_to_linear(b).unwrap();
            let rhs = db_to_linear(a + b).unwrap();
            prop_assert!(((lhs - rhs) / rhs).abs() <= 1e-12);
        }

        #[test]
        fn db_to_linear_is_strictly_increasing(a in -100.0f64..100.0, d in 1e-9f64..10.0) {
            prop_assert!(db_to_linear(a + d).unwrap() > db_to_linear(a).unwrap());
        }
    }
}
