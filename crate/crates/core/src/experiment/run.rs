//! Scheme evaluation, sweeps and convergence traces.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::experiment::config::{Axis, ExperimentConfig, Scheme, ScenarioConfig};
use crate::fisher::crb_from_objective;
use crate::optim::{
    ascent_multistart_from, random_unitary_objective, Architecture, OptimizerConfig,
    OptimizerTrace, ScatteringMatrix, Status,
};
use crate::scene::Scenario;

/// Outcome of one scheme on one scenario.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub g_value: f64,
    pub crb_theta: f64,
    pub iterations: usize,
    /// Optimized matrix and trace, for the ascent-based schemes.
    pub solution: Option<(ScatteringMatrix, OptimizerTrace)>,
}

/// Evaluates `scheme`. `architecture` applies to the proposed scheme only;
/// `extra_starts` are added to its random restarts.
pub fn evaluate_scheme(
    scene: &Scenario,
    scheme: Scheme,
    architecture: Architecture,
    optimizer: &OptimizerConfig,
    random_samples: usize,
    extra_starts: &[ScatteringMatrix],
) -> Result<SchemeOutcome> {
    let optimized = |arch, extra: &[ScatteringMatrix]| -> Result<SchemeOutcome> {
        let (phi, trace) = ascent_multistart_from(scene, arch, optimizer, extra)?;
        Ok(SchemeOutcome {
            scheme,
            g_value: trace.final_g(),
            crb_theta: trace.final_crb(),
            iterations: trace.iterations(),
            solution: Some((phi, trace)),
        })
    };
    match scheme {
        Scheme::Proposed => optimized(architecture, extra_starts),
        Scheme::DiagonalBaseline => optimized(Architecture::SingleConnected, &[]),
        Scheme::RandomUnitary => {
            let stats = random_unitary_objective(scene, optimizer.seed, random_samples)?;
            Ok(SchemeOutcome {
                scheme,
                g_value: stats.mean_g,
                crb_theta: stats.mean_crb,
                iterations: 0,
                solution: None,
            })
        }
    }
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: Scheme,
    pub g_value: f64,
    pub crb_theta: f64,
    pub crb_db: f64,
    pub iterations: usize,
    /// Seconds; zero unless timing was requested.
    pub wall_time: f64,
}

pub fn crb_db(crb: f64) -> f64 {
    10.0 * crb.log10()
}

/// Options that do not belong in the config document.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Measure wall time. Timed outputs are not reproducible.
    pub timing: bool,
}

/// The scenario at one sweep point.
fn scenario_at(config: &ExperimentConfig, axis: Axis, value: f64) -> Result<Scenario> {
    let mut sc: ScenarioConfig = config.scenario.clone();
    match axis {
        Axis::NR => sc.n_r = value as usize,
        Axis::RisXPosition => sc.ris[0] = value,
        Axis::Slots => sc.slots = value as usize,
        Axis::NoisePower => sc.noise_power_dbm = value,
        Axis::Iterations | Axis::GroupSize => {}
    }
    sc.build()
}

/// One [`SweepRow`] per (axis value, scheme), in axis order then config order
/// of the schemes.
pub fn run_sweep(config: &ExperimentConfig, options: RunOptions) -> Result<Vec<SweepRow>> {
    let sweep = config.sweep.as_ref().ok_or_else(|| {
        crate::Error::Config("the sweep subcommand needs a \"sweep\" section".into())
    })?;
    let optimizer = config.optimizer_config();
    optimizer.validate()?;
    let base = config.scenario.build()?;
    let schemes = &config.schemes;

    let row = |value: f64, o: &SchemeOutcome, secs: f64| SweepRow {
        axis_value: value,
        scheme: o.scheme,
        g_value: o.g_value,
        crb_theta: o.crb_theta,
        crb_db: crb_db(o.crb_theta),
        iterations: o.iterations,
        wall_time: if options.timing { secs } else { 0.0 },
    };
    let timed = |f: &dyn Fn() -> Result<SchemeOutcome>| -> Result<(SchemeOutcome, f64)> {
        let start = Instant::now();
        let o = f()?;
        Ok((o, start.elapsed().as_secs_f64()))
    };

    match sweep.axis {
        // Phi does not depend on sigma^2 or L: optimize once, rescale exactly.
        Axis::NoisePower | Axis::Slots => {
            let outcomes: Vec<(SchemeOutcome, f64)> = schemes
                .par_iter()
                .map(|&s| {
                    timed(&|| {
                        evaluate_scheme(
                            &base,
                            s,
                            Architecture::FullyConnected,
                            &optimizer,
                            config.random_samples,
                            &[],
                        )
                    })
                })
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for &value in &sweep.values {
                let scene = scenario_at(config, sweep.axis, value)?;
                for (o, secs) in &outcomes {
                    let crb = match o.scheme {
                        Scheme::RandomUnitary => {
                            random_unitary_objective(&scene, optimizer.seed, config.random_samples)?
                                .mean_crb
                        }
                        _ => crb_from_objective(&scene, o.g_value),
                    };
                    let rescaled = SchemeOutcome {
                        crb_theta: crb,
                        solution: None,
                        ..o.clone()
                    };
                    rows.push(row(value, &rescaled, *secs));
                }
            }
            Ok(rows)
        }
        Axis::GroupSize => {
            let n = base.n_r;
            let mut rows = Vec::new();
            // independent of the group size
            let fixed: Vec<(SchemeOutcome, f64)> = schemes
                .par_iter()
                .filter(|s| **s != Scheme::Proposed)
                .map(|&s| {
                    timed(&|| {
                        evaluate_scheme(&base, s, Architecture::FullyConnected, &optimizer, config.random_samples, &[])
                    })
                })
                .collect::<Result<_>>()?;
            let mut previous: Option<(usize, ScatteringMatrix)> = None;
            for &value in &sweep.values {
                let group = value as usize;
                let arch = Architecture::from_group_size(group, n)?;
                let mut fixed_iter = fixed.iter();
                for &s in schemes {
                    if s == Scheme::Proposed {
                        let extra: Vec<ScatteringMatrix> = match &previous {
                            Some((g, phi)) if sweep.nested_warm_start && group.is_multiple_of(*g) => {
                                vec![phi.clone()]
                            }
                            _ => Vec::new(),
                        };
                        let (o, secs) = timed(&|| {
                            evaluate_scheme(&base, s, arch, &optimizer, config.random_samples, &extra)
                        })?;
                        if let Some((phi, _)) = &o.solution {
                            previous = Some((group, phi.clone()));
                        }
                        rows.push(row(value, &o, secs));
                    } else {
                        let (o, secs) = fixed_iter.next().expect("one outcome per fixed scheme");
                        rows.push(row(value, o, *secs));
                    }
                }
            }
            Ok(rows)
        }
        Axis::Iterations | Axis::NR | Axis::RisXPosition => {
            let per_value: Vec<Vec<SweepRow>> = sweep
                .values
                .par_iter()
                .map(|&value| {
                    let scene = scenario_at(config, sweep.axis, value)?;
                    let opt = if sweep.axis == Axis::Iterations {
                        OptimizerConfig {
                            max_iters: value as usize,
                            ..optimizer
                        }
                    } else {
                        optimizer
                    };
                    schemes
                        .iter()
                        .map(|&s| {
                            let (o, secs) = timed(&|| {
                                evaluate_scheme(&scene, s, Architecture::FullyConnected, &opt, config.random_samples, &[])
                            })?;
                            Ok(row(value, &o, secs))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            Ok(per_value.into_iter().flatten().collect())
        }
    }
}

/// One line of `trace.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub scheme: Scheme,
    pub iter: usize,
    pub g_value: f64,
    pub crb_theta: f64,
    pub crb_db: f64,
    /// Empty for the baselines.
    pub mu: Option<f64>,
    pub eta: Option<f64>,
    pub unitarity_drift: Option<f64>,
}

/// Per-iteration trace of the proposed scheme on the configured scenario, plus
/// the baselines as constant reference rows over the same iteration range.
pub fn run_convergence(config: &ExperimentConfig) -> Result<(Vec<TraceRow>, Status)> {
    let optimizer = config.optimizer_config();
    let scene = config.scenario.build()?;
    let (phi_trace, status) = {
        let o = evaluate_scheme(&scene, Scheme::Proposed, Architecture::FullyConnected, &optimizer, config.random_samples, &[])?;
        let (_, trace) = o.solution.expect("proposed scheme returns a trace");
        let status = trace.status;
        (trace, status)
    };
    let mut rows: Vec<TraceRow> = phi_trace
        .records
        .iter()
        .map(|r| TraceRow {
            scheme: Scheme::Proposed,
            iter: r.iter,
            g_value: r.g_value,
            crb_theta: r.crb_theta,
            crb_db: crb_db(r.crb_theta),
            mu: Some(r.mu),
            eta: Some(r.eta),
            unitarity_drift: Some(r.unitarity_drift),
        })
        .collect();
    let last = phi_trace.records.last().map_or(0, |r| r.iter);
    let baselines: Vec<SchemeOutcome> = config
        .schemes
        .par_iter()
        .filter(|s| **s != Scheme::Proposed)
        .map(|&s| evaluate_scheme(&scene, s, Architecture::FullyConnected, &optimizer, config.random_samples, &[]))
        .collect::<Result<_>>()?;
    for o in baselines {
        rows.extend((0..=last).map(|iter| TraceRow {
            scheme: o.scheme,
            iter,
            g_value: o.g_value,
            crb_theta: o.crb_theta,
            crb_db: crb_db(o.crb_theta),
            mu: None,
            eta: None,
            unitarity_drift: None,
        }));
    }
    Ok((rows, status))
}

/// Summary of one scheme for `optimize.json`.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizeSummary {
    pub scheme: Scheme,
    pub g_value: f64,
    pub crb_theta: f64,
    pub crb_db: f64,
    pub iterations: usize,
    pub status: Option<Status>,
    /// Row-major `[re, im]` pairs of the optimized matrix.
    pub phi: Option<Vec<Vec<[f64; 2]>>>,
}

/// All configured schemes on the configured scenario, with the proposed
/// scheme's trace.
pub fn run_optimize(config: &ExperimentConfig) -> Result<(Vec<OptimizeSummary>, Option<OptimizerTrace>)> {
    let optimizer = config.optimizer_config();
    let scene = config.scenario.build()?;
    let outcomes: Vec<SchemeOutcome> = config
        .schemes
        .par_iter()
        .map(|&s| evaluate_scheme(&scene, s, Architecture::FullyConnected, &optimizer, config.random_samples, &[]))
        .collect::<Result<_>>()?;
    let mut trace = None;
    let summaries = outcomes
        .into_iter()
        .map(|o| {
            let (status, phi) = match &o.solution {
                Some((phi, t)) => {
                    if o.scheme == Scheme::Proposed {
                        trace = Some(t.clone());
                    }
                    let m = phi.matrix();
                    let rows = (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect();
                    (Some(t.status), Some(rows))
                }
                None => (None, None),
            };
            OptimizeSummary {
                scheme: o.scheme,
                g_value: o.g_value,
                crb_theta: o.crb_theta,
                crb_db: crb_db(o.crb_theta),
                iterations: o.iterations,
                status,
                phi,
            }
        })
        .collect();
    Ok((summaries, trace))
}
