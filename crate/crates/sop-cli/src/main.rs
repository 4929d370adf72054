//! `sop` — secrecy outage probability of an underlay cognitive small-cell
//! network with unreliable wireless backhaul.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sop_cli::config::{parse_config, parse_scenario};
use sop_cli::selftest::run_triple_agreement;
use sop_cli::sweep::{emit_csv, run_sweep};
use sop_cli::{CliError, Result};
use sop_core::analytic::{sop_closed_form, sop_quadrature};
use sop_core::montecarlo::{estimate_sop, McConfig};
use sop_core::power::compute_power_allocation;

#[derive(Parser)]
#[command(
    name = "sop",
    version,
    about = "Secrecy outage probability of a cognitive small-cell network with unreliable backhaul",
    long_about = "Computes the secrecy outage probability three independent ways (closed form, \
                  adaptive quadrature of the defining integral, Monte Carlo channel simulation) \
                  and reproduces the parameter-sweep figure curves as CSV."
)]
struct Cli {
    /// Number of worker threads (default: all cores). Results are
    /// bit-identical for any setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario with all three methods and print the
    /// closed-form breakdown.
    Eval {
        /// Scenario JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Override the primary transmit power in dB.
        #[arg(long = "pt-db")]
        pt_db: Option<f64>,
    },
    /// Run the sweep described in the config and write a CSV curve.
    Sweep {
        /// Sweep JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check closed form, quadrature and Monte Carlo on randomized
    /// scenarios.
    Selftest {
        /// Number of randomized scenarios.
        #[arg(long, default_value_t = 50)]
        tuples: usize,
        /// Seed for scenario generation and simulation.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Monte Carlo trials per scenario.
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
    },
    /// List the shipped figure-preset configs.
    Presets,
}

const PRESETS: &[(&str, &str)] = &[
    ("configs/baseline.json", "single-point scenario: K=6, reliability 0.99, phi 0.1, P_T = 10 dB"),
    ("configs/fig2_k2.json", "SOP vs P_T (0..40 dB), K = 2"),
    ("configs/fig2_k4.json", "SOP vs P_T (0..40 dB), K = 4"),
    ("configs/fig2_k6.json", "SOP vs P_T (0..40 dB), K = 6"),
    ("configs/fig3_lambda095.json", "SOP vs P_T, backhaul reliability 0.95, K = 6"),
    ("configs/fig3_lambda097.json", "SOP vs P_T, backhaul reliability 0.97, K = 6"),
    ("configs/fig3_lambda099.json", "SOP vs P_T, backhaul reliability 0.99, K = 6"),
    ("configs/fig4_phi001.json", "SOP vs P_T, primary outage level 0.01, K = 6"),
    ("configs/fig4_phi005.json", "SOP vs P_T, primary outage level 0.05, K = 6"),
    ("configs/fig4_phi010.json", "SOP vs P_T, primary outage level 0.10, K = 6"),
];

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(CliError::Io)
}

fn cmd_eval(config: &Path, pt_db_override: Option<f64>) -> Result<()> {
    let text = read_config(config)?;
    let mut scenario = parse_scenario(&text)?;
    if let Some(pt_db) = pt_db_override {
        scenario.params.primary.gamma_t = sop_core::model::db_to_linear(pt_db)?;
        scenario
            .params
            .validate()
            .map_err(sop_core::Error::Validation)?;
    }
    let params = scenario.params;
    let mc_cfg = scenario.mc.unwrap_or_else(|| McConfig::new(1_000_000, 42));

    println!("scenario: {}", config.display());
    println!(
        "  primary:   Gamma_T = {:.6} ({:.2} dB), beta = {}, phi = {}",
        params.primary.gamma_t,
        10.0 * params.primary.gamma_t.log10(),
        params.primary.beta,
        params.primary.phi
    );
    println!(
        "  secondary: K = {}, reliability = {}, R_th = {}",
        params.secondary.k, params.secondary.reliability, params.secondary.r_th
    );
    let ch = &params.channels;
    println!(
        "  channels:  lambda_tr={:.6} td={:.6} te={:.6} sr={:.6} sd={:.6} se={:.6}",
        ch.lambda_tr, ch.lambda_td, ch.lambda_te, ch.lambda_sr, ch.lambda_sd, ch.lambda_se
    );

    let alloc = compute_power_allocation(&params)?;
    println!(
        "\npower allocation: xi = {:.9e}, Gamma_S = {:.9e}, feasible = {}",
        alloc.xi, alloc.gamma_s, alloc.feasible
    );

    let bd = sop_closed_form(&params, &alloc)?;
    println!("\nclosed form: sop = {:.12e} (rho = {:.12})", bd.sop, bd.rho);
    if !bd.per_k.is_empty() {
        println!("  k |          a |          b |          c |        A_k |        B_k |       I1_k |       I2_k");
        for (i, t) in bd.per_k.iter().enumerate() {
            println!(
                " {:2} | {:10.4e} | {:10.4e} | {:10.4e} | {:10.4e} | {:10.4e} | {:10.4e} | {:10.4e}",
                i + 1,
                t.a,
                t.b,
                t.c,
                t.big_a,
                t.big_b,
                t.i1,
                t.i2
            );
        }
    }

    let quad = sop_quadrature(&params, &alloc)?;
    println!("\nquadrature:  sop = {quad:.12e}   |closed - quad| = {:.3e}", (bd.sop - quad).abs());

    let est = estimate_sop(&params, &alloc, &mc_cfg)?;
    println!(
        "monte carlo: sop = {:.12e}   ({} trials, seed {}, std err {:.3e})",
        est.sop_hat, est.trials, est.seed, est.std_err
    );
    println!("             95% CI [{:.6e}, {:.6e}]", est.ci95.0, est.ci95.1);
    if !est.ci95_normal_approx_valid() {
        eprintln!("warning: fewer than 10 outages observed; the normal-approximation CI is unreliable");
    }
    let sigma = (bd.sop * (1.0 - bd.sop) / est.trials as f64).sqrt().max(1e-12);
    println!(
        "             deviation from closed form: {:+.2} sigma",
        (est.sop_hat - bd.sop) / sigma
    );
    Ok(())
}

fn cmd_sweep(config: &Path, out: &Path) -> Result<()> {
    let text = read_config(config)?;
    let spec = parse_config(&text)?;
    let result = run_sweep(&spec);
    let csv = emit_csv(&result);
    std::fs::write(out, csv.as_bytes()).map_err(CliError::Io)?;

    println!("sweep: {}", config.display());
    println!("  axis: {} over {} grid points", result.axis.name(), result.rows.len());
    println!("  methods: {:?}", spec.methods);
    if let Some(seed) = result.metadata.seed {
        println!("  mc seed: {seed}");
    }
    println!("  tool version: {}", result.metadata.version);
    println!("  timestamp: {}", result.metadata.timestamp);
    println!("  resolved config: {}", result.metadata.config_echo);
    let failures: Vec<&str> = result
        .rows
        .iter()
        .filter_map(|r| r.note.as_deref())
        .collect();
    if !failures.is_empty() {
        eprintln!("warning: {} grid point(s) reported method failures:", failures.len());
        for f in failures {
            eprintln!("  {f}");
        }
    }
    println!("  wrote {}", out.display());
    Ok(())
}

fn cmd_selftest(tuples: usize, seed: u64, trials: u64) -> Result<()> {
    println!("selftest: {tuples} randomized feasible scenarios, {trials} MC trials each, seed {seed}");
    let report = run_triple_agreement(tuples, seed, trials);
    for o in &report.outcomes {
        if !o.quad_agrees || !o.mc_agrees {
            println!(
                "  tuple {:3}: closed={:.9e} quad={:.9e} mc={:.9e} sigma={:.2e}  [{}{}]",
                o.index,
                o.sop_closed,
                o.sop_quad,
                o.sop_mc,
                o.mc_sigma,
                if o.quad_agrees { "" } else { "QUAD " },
                if o.mc_agrees { "" } else { "MC" },
            );
        }
    }
    println!(
        "  closed-vs-quadrature failures: {} / {}",
        report.quad_failures, tuples
    );
    println!(
        "  monte-carlo 4-sigma misses:    {} / {} (binomial slack allows {})",
        report.mc_failures,
        tuples,
        tuples / 40
    );
    if report.passed() {
        println!("selftest PASS");
        Ok(())
    } else {
        Err(CliError::Core(sop_core::Error::Consistency(
            "triple agreement broken; see tuples above".into(),
        )))
    }
}

fn cmd_presets() -> Result<()> {
    println!("shipped preset configs (paths relative to the repository root):\n");
    for (path, description) in PRESETS {
        println!("  {path:32} {description}");
    }
    println!("\nrun a sweep preset:   sop sweep --config configs/fig2_k6.json --out fig2_k6.csv");
    println!("evaluate a scenario:  sop eval --config configs/baseline.json");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Eval { config, pt_db } => cmd_eval(&config, pt_db),
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Selftest {
            tuples,
            seed,
            trials,
        } => cmd_selftest(tuples, seed, trials),
        Command::Presets => cmd_presets(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
