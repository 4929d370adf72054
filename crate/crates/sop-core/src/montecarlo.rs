//! First-principles channel simulator: ground truth for the analytic SOP.
//!
//! Each trial draws the raw channel power gains, selects the small-cell
//! transmitter with the largest S→D gain, flips the backhaul coin for the
//! selected link only, forms both SINRs and tests the secrecy capacity
//! against the target rate.
//!
//! Reproducibility contract: trial i draws from ChaCha8 stream i of a
//! fixed seed. Results are therefore bit-identical for any batch size and
//! any degree of parallelism, and independent of execution order. The
//! reduction is an integer count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::power::PowerAllocation;

/// Trial budget and seeding of an estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Reduction granularity; has no effect on the estimate, only on how
    /// work is chunked across threads.
    pub batch_size: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            batch_size: trials.clamp(1, 16_384),
        }
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Self {
        self.batch_size = batch_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.batch_size < 1 || self.batch_size > self.trials {
            return Err(Error::Domain(format!(
                "batch_size must lie in 1..=trials, got {} with trials {}",
                self.batch_size, self.trials
            )));
        }
        Ok(())
    }
}

/// Empirical SOP with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub sop_hat: f64,
    /// sqrt(p (1-p) / n) at p = sop_hat.
    pub std_err: f64,
    /// Normal-approximation 95% interval, clamped to [0, 1].
    pub ci95: (f64, f64),
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    /// The normal approximation behind `ci95` is documented as invalid
    /// when fewer than ~10 outages were observed.
    pub fn ci95_normal_approx_valid(&self) -> bool {
        self.sop_hat * self.trials as f64 >= 10.0
    }
}

/// One sampled pair of destination and eavesdropper SINRs (backhaul
/// indicator already folded into `gamma_sd`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub gamma_sd: f64,
    pub gamma_se: f64,
}

/// Uniform in [0, 1) from the top 53 bits.
#[inline]
fn uniform_co<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in (0, 1]; safe under `ln`.
#[inline]
fn uniform_oc<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential draw by inverse CDF.
#[inline]
fn exp_draw<R: RngCore>(rng: &mut R, lambda: f64) -> f64 {
    -uniform_oc(rng).ln() / lambda
}

/// Index of the maximum gain; ties (a measure-zero event) go to the lowest
/// index.
fn select_max(gains: &[f64]) -> usize {
    let mut best = 0;
    for (i, &g) in gains.iter().enumerate().skip(1) {
        if g > gains[best] {
            best = i;
        }
    }
    best
}

/// Secrecy outage test: [log2(1+sd) - log2(1+se)]+ < r_th.
#[inline]
fn outage(gamma_sd: f64, gamma_se: f64, r_th: f64) -> bool {
    let cs = ((1.0 + gamma_sd).log2() - (1.0 + gamma_se).log2()).max(0.0);
    cs < r_th
}

/// Draw one SINR pair. Draw order per trial: K selection gains, backhaul
/// uniform, |h_TD|², |h_S(k*)E|², |h_TE|².
fn draw_sinrs<R: RngCore>(params: &SystemParams, alloc: &PowerAllocation, rng: &mut R) -> SinrSample {
    let ch = &params.channels;
    let k = params.secondary.k as usize;
    let gamma_t = params.primary.gamma_t;
    let gamma_s = alloc.gamma_s;

    // Transmit power is common to all candidates, so the arg-max over
    // P_S |h|^2 is the arg-max over the gains alone.
    let mut gains = [0.0f64; crate::model::MAX_TRANSMITTERS as usize];
    for g in gains.iter_mut().take(k) {
        *g = exp_draw(rng, ch.lambda_sd);
    }
    let best = gains[select_max(&gains[..k])];
    let backhaul_ok = uniform_co(rng) < params.secondary.reliability;
    let h_td = exp_draw(rng, ch.lambda_td);
    let h_se = exp_draw(rng, ch.lambda_se);
    let h_te = exp_draw(rng, ch.lambda_te);

    let gamma_sd = if backhaul_ok {
        gamma_s * best / (gamma_t * h_td + 1.0)
    } else {
        0.0
    };
    let gamma_se = gamma_s * h_se / (gamma_t * h_te + 1.0);
    SinrSample { gamma_sd, gamma_se }
}

/// One outage trial. With a silent secondary (`gamma_s = 0`) the secrecy
/// rate is zero and the trial is an outage unconditionally, without
/// consuming randomness.
pub fn simulate_trial<R: RngCore>(
    params: &SystemParams,
    alloc: &PowerAllocation,
    rng: &mut R,
) -> bool {
    if alloc.gamma_s == 0.0 {
        return true;
    }
    let s = draw_sinrs(params, alloc, rng);
    outage(s.gamma_sd, s.gamma_se, params.secondary.r_th)
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng
}

fn batch_ranges(trials: u64, batch_size: u64) -> Vec<(u64, u64)> {
    (0..trials)
        .step_by(batch_size as usize)
        .map(|start| (start, (start + batch_size).min(trials)))
        .collect()
}

/// Estimate the SOP as the empirical outage frequency.
///
/// Deterministic for a fixed `(seed, trials)`: per-trial randomness comes
/// from stream `trial_index`, so the estimate does not depend on
/// `batch_size` or on how many threads execute the batches.
pub fn estimate_sop(
    params: &SystemParams,
    alloc: &PowerAllocation,
    cfg: &McConfig,
) -> Result<McEstimate> {
    params.validate().map_err(Error::Validation)?;
    cfg.validate()?;

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outages: u64 = batch_ranges(cfg.trials, cfg.batch_size)
        .into_par_iter()
        .map(|(start, end)| {
            let mut count = 0u64;
            for t in start..end {
                let mut rng = trial_rng(&base, t);
                if simulate_trial(params, alloc, &mut rng) {
                    count += 1;
                }
            }
            count
        })
        .sum();

    let n = cfg.trials as f64;
    let sop_hat = outages as f64 / n;
    let std_err = (sop_hat * (1.0 - sop_hat) / n).sqrt();
    let half = 1.959963984540054 * std_err;
    Ok(McEstimate {
        sop_hat,
        std_err,
        ci95: ((sop_hat - half).max(0.0), (sop_hat + half).min(1.0)),
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

/// Sample SINR pairs (for distribution-level validation). Trial i uses the
/// same stream as [`estimate_sop`] would, so the two views of the channel
/// are consistent.
pub fn sample_sinrs(
    params: &SystemParams,
    alloc: &PowerAllocation,
    cfg: &McConfig,
) -> Result<Vec<SinrSample>> {
    params.validate().map_err(Error::Validation)?;
    cfg.validate()?;
    if alloc.gamma_s == 0.0 {
        return Err(Error::Domain(
            "sample_sinrs requires a transmitting secondary (gamma_s > 0)".into(),
        ));
    }
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(&base, t);
            draw_sinrs(params, alloc, &mut rng)
        })
        .collect())
}
