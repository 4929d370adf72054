//! Adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule supplies the
//! per-segment error estimate; the driver bisects the segment with the
//! largest estimate until the summed estimate meets the requested absolute
//! tolerance. Semi-infinite integrals are handled by the callers, which
//! truncate at a point where an analytic tail bound drops below tolerance.

use crate::error::{Error, Result};

/// Abscissae of the 15-point Kronrod rule (positive half, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Weights of the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Weights of the 15-point Kronrod rule.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub segments: usize,
}

/// QUADPACK error rescaling: sharpens the raw |Kronrod - Gauss| difference
/// using the deviation integral, and floors it at 50 eps of |integral|.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One application of the G7-K15 pair on [a, b]. Returns (value, error
/// estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let abs_err = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, abs_err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

const MAX_SEGMENTS: usize = 4096;

/// Integrate `f` over [a, b] to the requested absolute tolerance.
///
/// Fails with [`Error::QuadratureNoConvergence`] (carrying the achieved
/// estimate) if the segment budget runs out first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {abs_tol}"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err_est: 0.0,
            segments: 0,
        });
    }

    let (value, err) = qk15(&f, a, b);
    let mut segments = vec![Segment { a, b, value, err }];

    loop {
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        if total_err <= abs_tol || total_err <= 1e-3 * f64::EPSILON {
            break;
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureNoConvergence {
                achieved: total_err,
                requested: abs_tol,
            });
        }
        // Bisect the segment with the largest error estimate.
        let (worst_idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .expect("segment list is never empty");
        let worst = segments.swap_remove(worst_idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval narrower than f64 spacing; keep it and accept its error.
            segments.push(worst);
            let total_err: f64 = segments.iter().map(|s| s.err).sum();
            if total_err > abs_tol {
                return Err(Error::QuadratureNoConvergence {
                    achieved: total_err,
                    requested: abs_tol,
                });
            }
            break;
        }
        let (lv, le) = qk15(&f, worst.a, mid);
        let (rv, re) = qk15(&f, mid, worst.b);
        segments.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        segments.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
    }

    // Compensated sum of the segment values.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for s in &segments {
        let y = s.value - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(QuadResult {
        value: sum,
        abs_err_est: segments.iter().map(|s| s.err).sum(),
        segments: segments.len(),
    })
}

/// Integrate over `[breakpoints[0], breakpoints[last]]` with forced panel
/// boundaries at every interior breakpoint, splitting the tolerance evenly.
///
/// Adaptive bisection starts from one rule application per panel, so a
/// feature much narrower than the full interval is only found if some
/// breakpoint pins it. Callers place breakpoints at integrand knots and
/// characteristic scales.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain(
            "integrate_panels needs at least two breakpoints".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    let per_panel_tol = abs_tol / (breakpoints.len() - 1) as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut segments = 0;
    for w in breakpoints.windows(2) {
        let r = integrate(&f, w[0], w[1], per_panel_tol)?;
        value += r.value;
        err += r.abs_err_est;
        segments += r.segments;
    }
    Ok(QuadResult {
        value,
        abs_err_est: err,
        segments,
    })
}
