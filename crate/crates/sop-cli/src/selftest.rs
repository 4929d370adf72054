//! Randomized triple-agreement check: closed form vs quadrature vs Monte
//! Carlo on feasible scenarios drawn from broad parameter ranges. Used by
//! the `selftest` subcommand and by the acceptance suite.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sop_core::analytic::{sop_closed_form, sop_quadrature};
use sop_core::model::{db_to_linear, ChannelMeans, PrimaryParams, SecondaryParams};
use sop_core::montecarlo::{estimate_sop, McConfig};
use sop_core::power::compute_power_allocation;
use sop_core::{PowerAllocation, SystemParams};

/// Closed form and quadrature must agree to this absolute tolerance.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Monte Carlo must sit within this many standard errors of the closed form.
pub const MC_SIGMA_BAND: f64 = 4.0;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Draw a random valid scenario with a feasible power allocation.
pub fn random_feasible_params(rng: &mut ChaCha8Rng) -> (SystemParams, PowerAllocation) {
    loop {
        let params = SystemParams {
            primary: PrimaryParams {
                gamma_t: db_to_linear(uniform(rng, 0.0, 30.0)).unwrap(),
                beta: uniform(rng, 0.1, 1.5),
                phi: uniform(rng, 0.02, 0.3),
            },
            secondary: SecondaryParams {
                k: 1 + (uniform(rng, 0.0, 8.0) as u32).min(7),
                reliability: uniform(rng, 0.5, 1.0),
                r_th: uniform(rng, 0.1, 2.0),
            },
            channels: ChannelMeans::from_db(
                uniform(rng, -8.0, 8.0),
                uniform(rng, -8.0, 8.0),
                uniform(rng, -8.0, 8.0),
                uniform(rng, -8.0, 8.0),
                uniform(rng, -8.0, 8.0),
                uniform(rng, -8.0, 8.0),
            )
            .unwrap(),
        };
        let alloc = compute_power_allocation(&params).unwrap();
        if alloc.feasible {
            return (params, alloc);
        }
    }
}

#[derive(Debug, Clone)]
pub struct TupleOutcome {
    pub index: usize,
    pub sop_closed: f64,
    pub sop_quad: f64,
    pub sop_mc: f64,
    pub mc_sigma: f64,
    pub quad_agrees: bool,
    pub mc_agrees: bool,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub outcomes: Vec<TupleOutcome>,
    pub quad_failures: usize,
    pub mc_failures: usize,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        // The 4-sigma Monte Carlo band is allowed a small binomial slack;
        // closed-form/quadrature agreement is an exact contract.
        self.quad_failures == 0 && self.mc_failures * 40 <= self.outcomes.len()
    }
}

/// Run `tuples` randomized scenarios with `mc_trials` Monte Carlo trials
/// each. Deterministic in `seed`.
pub fn run_triple_agreement(tuples: usize, seed: u64, mc_trials: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(tuples);
    let mut quad_failures = 0;
    let mut mc_failures = 0;
    for index in 0..tuples {
        let (params, alloc) = random_feasible_params(&mut rng);
        let sop_closed = sop_closed_form(&params, &alloc)
            .expect("closed form on validated feasible params")
            .sop;
        let sop_quad = sop_quadrature(&params, &alloc).expect("quadrature on validated params");
        let mc = estimate_sop(&params, &alloc, &McConfig::new(mc_trials, seed ^ index as u64))
            .expect("simulation on validated params");
        let mc_sigma = (sop_closed * (1.0 - sop_closed) / mc_trials as f64)
            .sqrt()
            .max(1e-9);
        let quad_agrees = (sop_closed - sop_quad).abs() < AGREEMENT_TOL;
        let mc_agrees = (mc.sop_hat - sop_closed).abs() <= MC_SIGMA_BAND * mc_sigma;
        quad_failures += usize::from(!quad_agrees);
        mc_failures += usize::from(!mc_agrees);
        outcomes.push(TupleOutcome {
            index,
            sop_closed,
            sop_quad,
            sop_mc: mc.sop_hat,
            mc_sigma,
            quad_agrees,
            mc_agrees,
        });
    }
    SelftestReport {
        outcomes,
        quad_failures,
        mc_failures,
    }
}
