//! Exponential-integral primitives for the closed-form SOP.
//!
//! The closed form needs `Ei(-x)` only for x > 0, and always in the product
//! `exp(x) * Ei(-x)`. That product must never be formed naively: the SOP
//! arguments `a*c` and `b*c` span many decades as the primary power sweeps
//! 0–40 dB, and `exp(x)` overflows past x ≈ 709 while `Ei(-x)` underflows.
//! [`exp_ei_neg_scaled`] therefore evaluates the product directly: a power
//! series where `exp(x)` is safe (x <= 1), and a modified Lentz continued
//! fraction for `e^x E1(x)` above that, which never forms either factor.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Series/continued-fraction crossover.
const SPLIT: f64 = 1.0;
const MAX_ITER: usize = 500;

/// `exp(x) * Ei(-x)` together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEiResult {
    /// The scaled product; strictly negative for x > 0.
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub abs_err_est: f64,
}

fn check_domain(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "Ei(-x) requires x > 0, got x = {x}"
        )));
    }
    Ok(())
}

/// E1(x) by its ascending series, for 0 < x <= 1:
/// E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n * n!).
/// Returns (E1, relative error estimate).
fn e1_series(x: f64) -> (f64, f64) {
    let mut sum = -EULER_GAMMA - x.ln();
    let mut q = 1.0f64; // (-x)^n / n!
    for n in 1..MAX_ITER {
        q *= -x / n as f64;
        let term = q / n as f64;
        sum -= term;
        if term.abs() < f64::EPSILON * sum.abs() {
            return (sum, 4.0 * f64::EPSILON);
        }
    }
    (sum, 1e-12)
}

/// `e^x E1(x)` by the Stieltjes continued fraction with modified Lentz,
/// for x > 1:
/// e^x E1(x) = 1 / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...))).
/// Returns (e^x E1, relative error estimate). No exponential is formed.
fn exp_e1_cf(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return (h, 8.0 * f64::EPSILON);
        }
    }
    // Converged as far as f64 allows; the last delta bounds the truncation.
    (h, 1e-13)
}

/// Ei(-x) = -E1(x) = -int_x^inf e^-t / t dt, for x > 0.
///
/// Strictly negative and increasing toward zero; underflows to -0 for
/// x beyond ~745 where e^-x leaves the f64 range.
pub fn ei_neg(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x <= SPLIT {
        let (e1, _) = e1_series(x);
        Ok(-e1)
    } else {
        let (scaled, _) = exp_e1_cf(x);
        Ok(-scaled * (-x).exp())
    }
}

/// `exp(x) * Ei(-x)`, finite for every positive x (including x = 1e6).
pub fn exp_ei_neg_scaled(x: f64) -> Result<ScaledEiResult> {
    check_domain(x)?;
    if x <= SPLIT {
        let (e1, rel) = e1_series(x);
        let value = -x.exp() * e1;
        Ok(ScaledEiResult {
            value,
            abs_err_est: rel * value.abs() + 1e-300,
        })
    } else {
        let (scaled, rel) = exp_e1_cf(x);
        let value = -scaled;
        Ok(ScaledEiResult {
            value,
            abs_err_est: rel * value.abs() + 1e-300,
        })
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::quad;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let err = (actual - expected).abs() / expected.abs();
        assert!(err <= tol, "actual={actual:e} expected={expected:e} rel={err:e}");
    }

    /// Independent oracle: e^x E1(x) = int_0^inf e^-u / (x+u) du, evaluated
    /// by adaptive quadrature with an analytic tail bound. Never touches the
    /// series or continued-fraction code paths.
    fn scaled_e1_quadrature(x: f64) -> f64 {
        let upper = 45.0 + 2.0 * (1.0 + x).ln();
        // The integral is bounded by ln((x+1)/x) + 1/e; keep the tolerance
        // proportional so it stays above the rule's roundoff floor.
        let tol = 1e-12 * ((1.0 + 1.0 / x).ln() + 0.4);
        let mut bps = vec![0.0, x.min(1.0), 1.0, 10.0, upper];
        bps.dedup();
        quad::integrate_panels(|u| (-u).exp() / (x + u), &bps, tol)
            .expect("oracle quadrature must converge")
            .value
    }

    // Frozen with mpmath at 50 digits.
    const EI_NEG_1: f64 = -0.21938393439552027368;
    const EI_NEG_10: f64 = -4.1569689296853242774e-6;
    const EXP_EI_1: f64 = -0.59634736232319407434;
    const EXP_EI_2: f64 = -0.3613286168882225847;
    const EXP_EI_100: f64 = -0.0099019422867330184064;
    const EXP_EI_1000: f64 = -0.000999001994023880715;
    const EXP_EI_1E6: f64 = -9.99999000001999994e-7;
    const EXP_EI_1E4: f64 = -8.6340880702127253302; // x = 1e-4

    #[test]
    fn ei_neg_known_values() {
        assert_rel(ei_neg(1.0).unwrap(), EI_NEG_1, 1e-14);
        assert_rel(ei_neg(10.0).unwrap(), EI_NEG_10, 1e-14);
        assert_rel(ei_neg(0.5).unwrap(), -0.55977359477616081175, 1e-14);
        assert_rel(ei_neg(2.0).unwrap(), -0.048900510708061119567, 1e-14);
    }

    #[test]
    fn ei_neg_vanishes_at_infinity() {
        let v = ei_neg(700.0).unwrap();
        assert!(v < 0.0 && v > -1e-300);
        let v = ei_neg(800.0).unwrap();
        assert!((-1e-300..=0.0).contains(&v));
    }

    #[test]
    fn ei_neg_rejects_nonpositive() {
        assert!(ei_neg(0.0).is_err());
        assert!(ei_neg(-1.0).is_err());
        assert!(ei_neg(f64::NAN).is_err());
        assert!(exp_ei_neg_scaled(0.0).is_err());
        assert!(exp_ei_neg_scaled(-3.0).is_err());
    }

    #[test]
    fn scaled_known_values() {
        assert_rel(exp_ei_neg_scaled(1.0).unwrap().value, EXP_EI_1, 1e-14);
        assert_rel(exp_ei_neg_scaled(2.0).unwrap().value, EXP_EI_2, 1e-14);
        assert_rel(exp_ei_neg_scaled(100.0).unwrap().value, EXP_EI_100, 1e-14);
        assert_rel(exp_ei_neg_scaled(1000.0).unwrap().value, EXP_EI_1000, 1e-14);
        assert_rel(exp_ei_neg_scaled(1e6).unwrap().value, EXP_EI_1E6, 1e-14);
        assert_rel(exp_ei_neg_scaled(1e-4).unwrap().value, EXP_EI_1E4, 1e-14);
    }

    #[test]
    fn scaled_matches_asymptotic_series_at_1000() {
        // -(1/x)(1 - 1/x + 2/x^2 - 6/x^3), truncation ~24/x^4 relative.
        let x = 1000.0f64;
        let asym = -(1.0 / x) * (1.0 - 1.0 / x + 2.0 / (x * x) - 6.0 / (x * x * x));
        assert_rel(exp_ei_neg_scaled(x).unwrap().value, asym, 3e-9);
    }

    #[test]
    fn scaled_consistent_with_naive_product_where_safe() {
        for x in [0.1f64, 0.5, 0.999, 1.001, 3.0, 20.0, 300.0] {
            let naive = x.exp() * ei_neg(x).unwrap();
            assert_rel(exp_ei_neg_scaled(x).unwrap().value, naive, 1e-12);
        }
    }

    #[test]
    fn crossover_is_seamless() {
        // eps is small enough that the function itself varies by ~4e-13,
        // so any branch mismatch beyond 1e-10 relative would show.
        let eps = 1e-12;
        let left = exp_ei_neg_scaled(SPLIT - eps).unwrap().value;
        let right = exp_ei_neg_scaled(SPLIT + eps).unwrap().value;
        assert!((left - right).abs() <= 1e-10 * left.abs());
    }

    #[test]
    fn matches_quadrature_oracle_on_log_grid() {
        // 60 log-spaced points in [1e-4, 700].
        let n = 60;
        let (lo, hi) = (1e-4f64.ln(), 700f64.ln());
        for i in 0..n {
            let x = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let oracle = -scaled_e1_quadrature(x);
            assert_rel(exp_ei_neg_scaled(x).unwrap().value, oracle, 1e-10);
        }
    }

    #[test]
    fn finite_negative_monotone_up_to_1e6() {
        let n = 80;
        let (lo, hi) = (1e-4f64.ln(), 1e6f64.ln());
        let mut prev = f64::NEG_INFINITY;
        for i in 0..n {
            let x = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let v = exp_ei_neg_scaled(x).unwrap().value;
            assert!(v.is_finite() && v < 0.0, "x={x} v={v}");
            assert!(v > prev, "not increasing at x={x}");
            // Standard E1 bounds: 1/(x+1) < e^x E1(x) < 1/x.
            assert!(v > -1.0 / x && v < -1.0 / (x + 1.0), "bounds fail at x={x}");
            prev = v;
        }
    }

    #[test]
    fn error_estimate_is_tight_on_required_range() {
        let n = 50;
        let (lo, hi) = (1e-6f64.ln(), 700f64.ln());
        for i in 0..n {
            let x = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let r = exp_ei_neg_scaled(x).unwrap();
            assert!(
                r.abs_err_est <= 1e-12 * r.value.abs() + 1e-300,
                "x={x} err_est={}",
                r.abs_err_est
            );
        }
    }
}
