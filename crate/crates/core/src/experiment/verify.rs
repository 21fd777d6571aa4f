//! The bundled oracle suite behind the `verify` subcommand.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::estimate::{monte_carlo_mse, noise_for_crb, ThetaGrid};
use crate::experiment::config::{ExperimentConfig, ScenarioConfig};
use crate::fd::fd_gradient_oracle;
use crate::fisher::{crb_theta, crb_via_inverse, fim_blocks};
use crate::linalg::{relative_error, seeded_rng};
use crate::optim::{
    ascent, ascent_multistart, euclidean_gradient, restart_seed, unitary_upper_bound,
    Architecture, OptimizerConfig, Status,
};
use crate::scene::{build_channel, random_phi, random_scene, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The worst measured value.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, measured: f64, threshold: f64, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        measured,
        threshold,
        detail,
    }
}

const SIZES: [usize; 3] = [2, 4, 8];

/// Seeded random `(scene, Phi)` pair `index`, cycling through the sizes.
fn random_pair(seed: u64, index: usize) -> (Scenario, crate::optim::ScatteringMatrix) {
    let mut rng = seeded_rng(restart_seed(seed, index));
    let n_r = SIZES[index % 3];
    let n_bs = SIZES[(index / 3) % 3];
    let scene = random_scene(n_bs, n_r, &mut rng);
    let phi = random_phi(n_r, &mut rng);
    (scene, phi)
}

pub fn gradient_check(config: &ExperimentConfig) -> Result<CheckResult> {
    let v = &config.verify;
    let errors: Vec<f64> = (0..v.gradient_pairs)
        .into_par_iter()
        .map(|i| {
            let (scene, phi) = random_pair(config.seed, i);
            let mut analytic = euclidean_gradient(&phi, &scene)?;
            if v.corrupt_gradient {
                analytic.neg_mut();
            }
            let fd = fd_gradient_oracle(phi.matrix(), &scene, v.fd_step)?;
            Ok(relative_error(&analytic, &fd))
        })
        .collect::<Result<_>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(check(
        "gradient_fd",
        worst,
        v.gradient_tolerance,
        worst <= v.gradient_tolerance,
        format!(
            "max relative Frobenius error of the analytic gradient vs central differences (step {:e}) over {} pairs{}",
            v.fd_step,
            v.gradient_pairs,
            if v.corrupt_gradient { "; analytic gradient sign-flipped" } else { "" }
        ),
    ))
}

pub fn schur_check(config: &ExperimentConfig) -> Result<CheckResult> {
    let v = &config.verify;
    let errors: Vec<f64> = (0..v.schur_draws)
        .into_par_iter()
        .map(|i| {
            let (scene, phi) = random_pair(config.seed ^ 0x5C4E_0000, i);
            let blocks = fim_blocks(&build_channel(&scene, &phi)?, &scene)?;
            let inv = crb_via_inverse(&blocks);
            Ok((inv - blocks.crb_theta).abs() / blocks.crb_theta)
        })
        .collect::<Result<_>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(check(
        "schur_cross_check",
        worst,
        v.schur_tolerance,
        worst <= v.schur_tolerance,
        format!("closed-form CRB vs inverted 3x3 FIM over {} draws", v.schur_draws),
    ))
}

pub fn scaling_check(config: &ExperimentConfig) -> Result<CheckResult> {
    let v = &config.verify;
    let mut worst = 0.0f64;
    for i in 0..10 {
        let (scene, phi) = random_pair(config.seed ^ 0x5CA1_E000, i);
        let b = build_channel(&scene, &phi)?;
        let base = crb_theta(&b, &scene)?;
        let cases = [
            (Scenario { slots: 2 * scene.slots, ..scene.clone() }, 0.5),
            (Scenario { noise_power: 2.0 * scene.noise_power, ..scene.clone() }, 2.0),
            (Scenario { power: 2.0 * scene.power, ..scene.clone() }, 0.5),
        ];
        for (s, ratio) in cases {
            let r = crb_theta(&b, &s)? / base;
            worst = worst.max((r - ratio).abs() / ratio);
        }
    }
    Ok(check(
        "scaling_laws",
        worst,
        v.scaling_tolerance,
        worst <= v.scaling_tolerance,
        "CRB ratios under doubling L, sigma^2 and P".into(),
    ))
}

/// Manifold integrity and monotonicity of one long ascent on the configured
/// scenario at `verify.ascent_n_r` elements.
pub fn integrity_checks(config: &ExperimentConfig) -> Result<Vec<CheckResult>> {
    let v = &config.verify;
    let scene = ScenarioConfig {
        n_r: v.ascent_n_r,
        ..config.scenario.clone()
    }
    .build()?;
    let opt = OptimizerConfig {
        max_iters: v.ascent_max_iters,
        restarts: 1,
        ..config.optimizer_config()
    };
    let (_, trace) = ascent_multistart(&scene, Architecture::FullyConnected, &opt)?;
    let drift = trace
        .records
        .iter()
        .map(|r| r.unitarity_drift)
        .fold(0.0, f64::max);
    let decrease = trace.max_decrease();
    let relative_decrease = trace
        .records
        .windows(2)
        .map(|w| (w[0].g_value - w[1].g_value).max(0.0) / w[0].g_value.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(vec![
        check(
            "unitarity",
            drift,
            v.unitarity_tolerance,
            drift <= v.unitarity_tolerance,
            format!("max ||Phi^H Phi - I||_F over {} iterates", trace.records.len()),
        ),
        check(
            "skew_hermitian",
            trace.max_skew_residual,
            v.skew_tolerance,
            trace.max_skew_residual <= v.skew_tolerance,
            "max relative skew-Hermitian residual of the geodesic directions".into(),
        ),
        check(
            "monotone_ascent",
            decrease,
            v.monotone_tolerance,
            decrease <= v.monotone_tolerance && relative_decrease <= v.monotone_tolerance,
            format!(
                "largest decrease of g between iterates over {} iterations (relative {relative_decrease:e})",
                trace.iterations()
            ),
        ),
    ])
}

/// Stationarity of converged runs and the gap to the closed-form optimum, on
/// seeded random scenes.
pub fn optimality_checks(config: &ExperimentConfig) -> Result<Vec<CheckResult>> {
    let v = &config.verify;
    let opt = OptimizerConfig {
        restarts: 1,
        epsilon: v.stationarity_epsilon,
        ..config.optimizer_config()
    };
    let runs: Vec<(Status, f64, f64)> = (0..v.stationarity_scenes)
        .into_par_iter()
        .map(|i| {
            let (scene, phi0) = random_pair(config.seed ^ 0x0A5C_E000, i);
            let (_, trace) = ascent(&scene, &phi0, &opt)?;
            let bound = unitary_upper_bound(&scene)?;
            Ok((
                trace.status,
                trace.final_eta / trace.initial_eta,
                (bound - trace.final_g()) / bound,
            ))
        })
        .collect::<Result<_>>()?;
    let converged: Vec<f64> = runs
        .iter()
        .filter(|r| r.0 == Status::Converged)
        .map(|r| r.1)
        .collect();
    let worst_ratio = converged.iter().copied().fold(0.0, f64::max);
    let worst_gap = runs.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
    Ok(vec![
        check(
            "stationarity",
            worst_ratio,
            v.stationarity_ratio,
            !converged.is_empty() && worst_ratio <= v.stationarity_ratio,
            format!(
                "max final / initial squared Riemannian gradient norm over {} of {} runs converged at epsilon {:e}",
                converged.len(),
                runs.len(),
                v.stationarity_epsilon
            ),
        ),
        check(
            "closed_form_optimum",
            worst_gap,
            v.optimality_gap,
            worst_gap <= v.optimality_gap,
            format!("max relative gap to |alpha|^2 s1(G)^2 ||a_dot_perp||^2 over {} scenes", runs.len()),
        ),
    ])
}

/// Monte Carlo ML efficiency on the configured scenario at `verify.mc_n_r`
/// elements, one check per CRB target.
pub fn mse_checks(config: &ExperimentConfig) -> Result<Vec<CheckResult>> {
    let v = &config.verify;
    let scene = ScenarioConfig {
        n_r: v.mc_n_r,
        ..config.scenario.clone()
    }
    .build()?;
    let (phi, _) = ascent_multistart(&scene, Architecture::FullyConnected, &config.optimizer_config())?;
    let mut out = Vec::new();
    for (k, &target) in v.mc_crb_targets.iter().enumerate() {
        let noisy = Scenario {
            noise_power: noise_for_crb(&scene, &phi, target)?,
            ..scene.clone()
        };
        let mc = monte_carlo_mse(&noisy, &phi, v.mc_trials, restart_seed(config.seed, k), ThetaGrid::default())?;
        let upper = if k == 0 { v.mse_upper_ratio } else { f64::INFINITY };
        let passed = mc.ratio >= v.mse_lower_ratio && mc.ratio <= upper;
        out.push(check(
            &format!("mse_vs_crb[{k}]"),
            mc.ratio,
            v.mse_lower_ratio,
            passed,
            format!(
                "MSE / CRB over {} trials at CRB {:e} (bias {:e}); pass range [{}, {}]",
                mc.trials, mc.crb, mc.bias, v.mse_lower_ratio, upper
            ),
        ));
    }
    Ok(out)
}

pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyReport> {
    let mut checks = vec![gradient_check(config)?, schur_check(config)?, scaling_check(config)?];
    checks.extend(integrity_checks(config)?);
    checks.extend(optimality_checks(config)?);
    checks.extend(mse_checks(config)?);
    Ok(VerifyReport {
        seed: config.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
