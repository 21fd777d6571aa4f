//! Adaptive Riemannian steepest ascent on (block-diagonal) unitary matrices.
//!
//! One iteration at `Phi`:
//!
//! 1. Euclidean gradient `Gamma = dg/dPhi*`, masked to the block support.
//! 2. Geodesic direction `S = Gamma Phi^H - Phi Gamma^H` (per block) and
//!    `eta = <S, S>`.
//! 3. Halve `mu` while `g(exp(mu S) Phi) - g(Phi) < mu eta / 2`, then double it
//!    while `g(exp(2 mu S) Phi) - g(Phi) >= mu eta`.
//! 4. `Phi <- exp(mu S) Phi`.
//!
//! Stop when `|g_t - g_{t-1}| / g_{t-1} <= epsilon`.
//!
//! Each block of `S` is factorized once per iteration, after which every trial
//! step only needs `exp(mu S) (Phi a)` and `exp(mu S) (Phi a_dot)`: two
//! matrix-vector products per block instead of a new exponential.
//!
//! The iteration runs on the unit-gain objective `g / |alpha|^2` (the phase of
//! `alpha` is kept), so step sizes do not depend on the path-loss scale. All
//! values reported in the trace are in physical units.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{crb_from_objective, objective_from};
use crate::linalg::{
    reunitarize, unitarity_report, CMatrix, CVector, SkewSpectrum, REUNITARIZE_THRESHOLD,
};
use crate::optim::gradient::GradientWorkspace;
use crate::optim::scattering::{Architecture, ScatteringMatrix};
use crate::scene::{Scenario, StaticChannel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Initial step size (unit-gain objective).
    pub mu_init: f64,
    /// Relative convergence tolerance on successive objective values.
    pub epsilon: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    pub max_doublings: usize,
    /// Random initializations per multi-start run.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            mu_init: 1e-2,
            epsilon: 1e-6,
            max_iters: 2000,
            max_halvings: 30,
            max_doublings: 30,
            restarts: 4,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.mu_init.is_finite() && self.mu_init > 0.0) {
            return bad(format!("mu_init must be positive, got {}", self.mu_init));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if self.max_halvings == 0 || self.max_doublings == 0 {
            return bad("max_halvings and max_doublings must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        Ok(())
    }
}

/// Seed of the `index`-th random initialization; index 0 uses `seed` itself.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    Degenerate,
}

/// State after `iter` accepted updates. Record 0 is the initial point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub g_value: f64,
    pub crb_theta: f64,
    /// Step size used for this update (unit-gain objective).
    pub mu: f64,
    /// `<S, S>` of the direction taken (physical units).
    pub eta: f64,
    pub unitarity_drift: f64,
    pub halvings: usize,
    pub doublings: usize,
    pub reunitarized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub records: Vec<IterationRecord>,
    pub status: Status,
    /// `<S, S>` at the initial point.
    pub initial_eta: f64,
    /// `<S, S>` at the returned point.
    pub final_eta: f64,
    /// Largest skew-Hermitian residual `||S + S^H||_F / (1 + ||S||_F)` seen.
    pub max_skew_residual: f64,
}

impl OptimizerTrace {
    pub fn final_g(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.g_value)
    }

    pub fn final_crb(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.crb_theta)
    }

    /// Number of accepted updates.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// Largest decrease of `g` between consecutive records (0 if monotone).
    pub fn max_decrease(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| (w[0].g_value - w[1].g_value).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Single-run ascent from `phi0`, respecting its architecture.
pub fn ascent(
    scene: &Scenario,
    phi0: &ScatteringMatrix,
    config: &OptimizerConfig,
) -> Result<(ScatteringMatrix, OptimizerTrace)> {
    config.validate()?;
    if phi0.dim() != scene.n_r {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", scene.n_r),
            got: format!("{0}x{0}", phi0.dim()),
        });
    }
    Engine::new(scene, phi0.architecture())?.run(phi0.clone(), config)
}

/// Best of `config.restarts` block-diagonal Haar initializations.
pub fn ascent_grouped(
    scene: &Scenario,
    group_size: usize,
    config: &OptimizerConfig,
) -> Result<(ScatteringMatrix, OptimizerTrace)> {
    let arch = Architecture::from_group_size(group_size, scene.n_r)?;
    ascent_multistart(scene, arch, config)
}

/// Multi-start ascent for any architecture. Restart `r` starts from
/// `ScatteringMatrix::random(n_r, arch, restart_seed(config.seed, r))`; the
/// highest final objective wins, ties going to the lower index.
pub fn ascent_multistart(
    scene: &Scenario,
    architecture: Architecture,
    config: &OptimizerConfig,
) -> Result<(ScatteringMatrix, OptimizerTrace)> {
    ascent_multistart_from(scene, architecture, config, &[])
}

/// [`ascent_multistart`] with additional given starting points, run after the
/// random ones. Each extra start is re-labelled with `architecture`, so it must
/// already satisfy that block structure.
pub fn ascent_multistart_from(
    scene: &Scenario,
    architecture: Architecture,
    config: &OptimizerConfig,
    extra_starts: &[ScatteringMatrix],
) -> Result<(ScatteringMatrix, OptimizerTrace)> {
    config.validate()?;
    let engine = Engine::new(scene, architecture)?;
    let extra: Vec<ScatteringMatrix> = extra_starts
        .iter()
        .map(|phi| ScatteringMatrix::new(phi.matrix().clone(), architecture))
        .collect::<Result<_>>()?;
    let total = config.restarts + extra.len();
    let runs: Vec<Result<(ScatteringMatrix, OptimizerTrace)>> = (0..total)
        .into_par_iter()
        .map(|r| {
            let phi0 = match r.checked_sub(config.restarts) {
                Some(k) => extra[k].clone(),
                None => ScatteringMatrix::random(
                    scene.n_r,
                    architecture,
                    restart_seed(config.seed, r),
                )?,
            };
            engine.run(phi0, config)
        })
        .collect();
    let mut best: Option<(ScatteringMatrix, OptimizerTrace)> = None;
    for run in runs {
        let run = run?;
        if best
            .as_ref()
            .is_none_or(|b| run.1.final_g() > b.1.final_g())
        {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no restarts".into()))
}

/// Statistics of `g` and the CRB over Haar-random scattering matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomBaseline {
    pub samples: usize,
    pub mean_g: f64,
    pub min_g: f64,
    pub max_g: f64,
    pub mean_crb: f64,
    pub min_crb: f64,
    pub max_crb: f64,
}

pub fn random_unitary_objective(scene: &Scenario, seed: u64, samples: usize) -> Result<RandomBaseline> {
    random_objective(scene, Architecture::FullyConnected, seed, samples)
}

/// Same as [`random_unitary_objective`] for block-diagonal draws.
pub fn random_objective(
    scene: &Scenario,
    architecture: Architecture,
    seed: u64,
    samples: usize,
) -> Result<RandomBaseline> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let channel = scene.static_channel()?;
    let mut rng = crate::linalg::seeded_rng(seed);
    let mut gs = Vec::with_capacity(samples);
    let mut crbs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let phi = ScatteringMatrix::random_with(scene.n_r, architecture, &mut rng)?;
        let b = channel.bundle(phi.matrix())?;
        let g = objective_from(&b.h, &b.h_dot)?;
        gs.push(g);
        crbs.push(crb_from_objective(scene, g));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(RandomBaseline {
        samples,
        mean_g: mean(&gs),
        min_g: gs.iter().copied().fold(f64::INFINITY, f64::min),
        max_g: gs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_crb: mean(&crbs),
        min_crb: crbs.iter().copied().fold(f64::INFINITY, f64::min),
        max_crb: crbs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

struct Engine<'a> {
    scene: &'a Scenario,
    /// channel with `alpha / |alpha|`
    unit: StaticChannel,
    gain2: f64,
    architecture: Architecture,
    blocks: Vec<std::ops::Range<usize>>,
}

struct Direction {
    spectra: Vec<SkewSpectrum>,
    coords_a: Vec<CVector>,
    coords_a_dot: Vec<CVector>,
    eta: f64,
    skew_residual: f64,
}

impl<'a> Engine<'a> {
    fn new(scene: &'a Scenario, architecture: Architecture) -> Result<Self> {
        let mut unit = scene.static_channel()?;
        let gain = unit.alpha.norm();
        if gain == 0.0 {
            return Err(Error::DegenerateChannel { norm_sq: 0.0 });
        }
        unit.alpha /= gain;
        let n = scene.n_r;
        Architecture::from_group_size(architecture.group_size(n), n)?;
        Ok(Self {
            scene,
            unit,
            gain2: gain * gain,
            architecture,
            blocks: architecture.blocks(n),
        })
    }

    fn unit_g(&self, phi_a: &CVector, phi_a_dot: &CVector) -> Result<f64> {
        let (h, h_dot) = self.unit.from_projected(phi_a, phi_a_dot);
        objective_from(&h, &h_dot)
    }

    fn direction(&self, phi: &CMatrix) -> Result<Direction> {
        let gamma = GradientWorkspace::compute(&self.unit, phi)?.euclidean;
        let a = &self.unit.a_ris_theta;
        let a_dot = &self.unit.a_ris_dot;
        let phi_a = phi * a;
        let phi_a_dot = phi * a_dot;
        let mut spectra = Vec::with_capacity(self.blocks.len());
        let mut coords_a = Vec::with_capacity(self.blocks.len());
        let mut coords_a_dot = Vec::with_capacity(self.blocks.len());
        let mut sq = 0.0;
        let mut skew = 0.0f64;
        for r in &self.blocks {
            let len = r.len();
            let phi_b = phi.view((r.start, r.start), (len, len));
            let gamma_b = gamma.view((r.start, r.start), (len, len));
            let m = gamma_b * phi_b.adjoint();
            let s = &m - m.adjoint();
            sq += s.norm_squared();
            skew = skew.max(crate::linalg::skew_residual(&s) / (1.0 + s.norm()));
            let spec = SkewSpectrum::new(&s)?;
            coords_a.push(spec.coordinates(&phi_a.rows(r.start, len).into_owned()));
            coords_a_dot.push(spec.coordinates(&phi_a_dot.rows(r.start, len).into_owned()));
            spectra.push(spec);
        }
        Ok(Direction {
            spectra,
            coords_a,
            coords_a_dot,
            eta: 0.5 * sq,
            skew_residual: skew,
        })
    }

    /// Unit-gain `g(exp(mu S) Phi)`.
    fn trial(&self, dir: &Direction, mu: f64) -> Result<f64> {
        let n = self.scene.n_r;
        let mut va = CVector::zeros(n);
        let mut vd = CVector::zeros(n);
        for (k, r) in self.blocks.iter().enumerate() {
            let spec = &dir.spectra[k];
            va.rows_mut(r.start, r.len())
                .copy_from(&spec.apply_exp(mu, &dir.coords_a[k]));
            vd.rows_mut(r.start, r.len())
                .copy_from(&spec.apply_exp(mu, &dir.coords_a_dot[k]));
        }
        self.unit_g(&va, &vd)
    }

    /// `exp(mu S) Phi` block by block, then the re-unitarization policy.
    fn step(&self, phi: &CMatrix, dir: &Direction, mu: f64) -> Result<(CMatrix, bool)> {
        let mut next = phi.clone();
        let mut fixed = false;
        for (k, r) in self.blocks.iter().enumerate() {
            let len = r.len();
            let rot = dir.spectra[k].exp(mu);
            let mut block = rot * phi.view((r.start, r.start), (len, len));
            if len == 1 {
                // exact polar factor of a scalar
                let z = block[(0, 0)];
                block[(0, 0)] = z / z.norm();
            } else if unitarity_report(&block).frobenius_drift > REUNITARIZE_THRESHOLD {
                block = reunitarize(&block)?;
                fixed = true;
            }
            next.view_mut((r.start, r.start), (len, len)).copy_from(&block);
        }
        Ok((next, fixed))
    }

    fn record(&self, iter: usize, unit_g: f64, mu: f64, eta: f64, phi: &CMatrix) -> IterationRecord {
        let g = unit_g * self.gain2;
        IterationRecord {
            iter,
            g_value: g,
            crb_theta: crb_from_objective(self.scene, g),
            mu,
            eta: eta * self.gain2 * self.gain2,
            unitarity_drift: unitarity_report(phi).frobenius_drift,
            halvings: 0,
            doublings: 0,
            reunitarized: false,
        }
    }

    // NaN must count as "no progress", hence the negated comparisons
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn run(
        &self,
        phi0: ScatteringMatrix,
        config: &OptimizerConfig,
    ) -> Result<(ScatteringMatrix, OptimizerTrace)> {
        let mut phi = phi0.into_matrix();
        let mut g = self.unit_g(&(&phi * &self.unit.a_ris_theta), &(&phi * &self.unit.a_ris_dot))?;
        let mut dir = self.direction(&phi)?;
        let initial_eta = dir.eta;
        let mut mu = config.mu_init;
        let mut records = vec![self.record(0, g, mu, dir.eta, &phi)];
        let mut max_skew = dir.skew_residual;
        let mut status = Status::MaxIters;

        for iter in 1..=config.max_iters {
            if !(dir.eta > 0.0) {
                records.push(self.record(iter, g, mu, dir.eta, &phi));
                status = Status::Converged;
                break;
            }
            let eta = dir.eta;

            let mut halvings = 0;
            let mut gain = self.trial(&dir, mu)? - g;
            let mut stalled = false;
            while gain < 0.5 * mu * eta {
                if halvings == config.max_halvings {
                    stalled = true;
                    break;
                }
                mu *= 0.5;
                halvings += 1;
                gain = self.trial(&dir, mu)? - g;
            }
            if stalled && !(gain > 0.0) {
                records.push(IterationRecord {
                    halvings,
                    ..self.record(iter, g, mu, eta, &phi)
                });
                status = Status::Converged;
                break;
            }

            let mut doublings = 0;
            if !stalled {
                while doublings < config.max_doublings
                    && self.trial(&dir, 2.0 * mu)? - g >= mu * eta
                {
                    mu *= 2.0;
                    doublings += 1;
                }
            }

            let (next, reunitarized) = self.step(&phi, &dir, mu)?;
            let g_next = match self.unit_g(&(&next * &self.unit.a_ris_theta), &(&next * &self.unit.a_ris_dot)) {
                Ok(v) => v,
                Err(Error::DegenerateChannel { .. }) => {
                    status = Status::Degenerate;
                    break;
                }
                Err(e) => return Err(e),
            };
            phi = next;
            let g_prev = g;
            g = g_next;
            records.push(IterationRecord {
                halvings,
                doublings,
                reunitarized,
                ..self.record(iter, g, mu, eta, &phi)
            });

            dir = self.direction(&phi)?;
            max_skew = max_skew.max(dir.skew_residual);
            let change = if g_prev > 0.0 {
                (g - g_prev).abs() / g_prev
            } else {
                (g - g_prev).abs()
            };
            if change <= config.epsilon {
                status = Status::Converged;
                break;
            }
        }

        let scale = self.gain2 * self.gain2;
        let trace = OptimizerTrace {
            records,
            status,
            initial_eta: initial_eta * scale,
            final_eta: dir.eta * scale,
            max_skew_residual: max_skew,
        };
        Ok((
            ScatteringMatrix::from_parts_unchecked(phi, self.architecture),
            trace,
        ))
    }
}

/// `g` in physical units for a feasible `Phi`.
pub fn objective_at(scene: &Scenario, phi: &ScatteringMatrix) -> Result<f64> {
    let b = crate::scene::build_channel(scene, phi)?;
    crate::fisher::objective_g(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{seeded_rng, C64};
    use crate::optim::unitary_upper_bound;
    use crate::scene::{random_phi, random_scene, RisBsLink};

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 2,
            ..Default::default()
        }
    }

    #[test]
    fn endpoint_angle_is_stationary() {
        let mut rng = seeded_rng(1);
        let mut s = random_scene(4, 4, &mut rng);
        s.theta = std::f64::consts::FRAC_PI_2;
        let (_, t) = ascent(&s, &random_phi(4, &mut rng), &quick()).unwrap();
        assert_eq!(t.status, Status::Converged);
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.final_g(), 0.0);
        assert_eq!(t.initial_eta, 0.0);
    }

    #[test]
    fn monotone_and_unitary() {
        let mut rng = seeded_rng(2);
        let s = random_scene(8, 8, &mut rng);
        let (phi, t) = ascent(&s, &random_phi(8, &mut rng), &quick()).unwrap();
        assert_eq!(t.max_decrease(), 0.0);
        assert!(t.records.iter().all(|r| r.unitarity_drift <= 1e-9));
        assert!(phi.unitarity().frobenius_drift <= 1e-9);
        assert_eq!(t.status, Status::Converged);
        assert!(t.final_eta <= 1e-4 * t.initial_eta);
        assert_eq!(t.records[0].iter, 0);
        assert!(t.records.windows(2).all(|w| w[1].iter == w[0].iter + 1));
    }

    #[test]
    fn reaches_closed_form_optimum() {
        let mut rng = seeded_rng(3);
        for (n_bs, n_r) in [(2, 2), (3, 5), (8, 4)] {
            let s = random_scene(n_bs, n_r, &mut rng);
            let (_, t) = ascent_multistart(&s, Architecture::FullyConnected, &quick()).unwrap();
            let bound = unitary_upper_bound(&s).unwrap();
            assert!(t.final_g() <= bound * (1.0 + 1e-12));
            assert!(t.final_g() >= bound * (1.0 - 1e-4), "{n_bs}x{n_r}");
        }
    }

    #[test]
    fn full_group_equals_plain_ascent() {
        let mut rng = seeded_rng(4);
        let s = random_scene(4, 6, &mut rng);
        let cfg = OptimizerConfig {
            restarts: 1,
            seed: 17,
            ..Default::default()
        };
        let (p1, t1) = ascent_grouped(&s, 6, &cfg).unwrap();
        let phi0 = ScatteringMatrix::random(6, Architecture::FullyConnected, 17).unwrap();
        let (p2, t2) = ascent(&s, &phi0, &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn group_one_stays_diagonal() {
        let mut rng = seeded_rng(5);
        let s = random_scene(4, 6, &mut rng);
        let (phi, t) = ascent_grouped(&s, 1, &quick()).unwrap();
        assert_eq!(phi.architecture(), Architecture::SingleConnected);
        let m = phi.matrix();
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    assert!((m[(i, i)].norm() - 1.0).abs() <= 1e-12);
                } else {
                    assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(t.max_decrease(), 0.0);
    }

    #[test]
    fn block_structure_preserved() {
        let mut rng = seeded_rng(6);
        let s = random_scene(4, 8, &mut rng);
        let (phi, _) = ascent_grouped(&s, 4, &quick()).unwrap();
        let m = phi.matrix();
        assert!(m.view((0, 4), (4, 4)).iter().all(|z| z.norm() == 0.0));
        assert!(m.view((4, 0), (4, 4)).iter().all(|z| z.norm() == 0.0));
        assert!(ScatteringMatrix::new(m.clone(), Architecture::GroupConnected { group_size: 4 }).is_ok());
    }

    #[test]
    fn warm_start_cannot_lose() {
        let mut rng = seeded_rng(7);
        let s = random_scene(4, 8, &mut rng);
        let (small, ts) = ascent_grouped(&s, 2, &quick()).unwrap();
        let (_, tl) = ascent_multistart_from(
            &s,
            Architecture::GroupConnected { group_size: 4 },
            &quick(),
            &[small],
        )
        .unwrap();
        assert!(tl.final_g() >= ts.final_g());
        // a start that violates the coarser structure is rejected
        let full = random_phi(8, &mut rng);
        assert!(ascent_multistart_from(&s, Architecture::SingleConnected, &quick(), &[full]).is_err());
    }

    #[test]
    fn global_phase_does_not_change_the_trace() {
        let mut rng = seeded_rng(8);
        let s = random_scene(3, 4, &mut rng);
        let phi0 = random_phi(4, &mut rng);
        let (_, a) = ascent(&s, &phi0, &quick()).unwrap();
        let (_, b) = ascent(&s, &phi0.with_global_phase(2.1), &quick()).unwrap();
        assert_eq!(a.iterations(), b.iterations());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert!((x.g_value - y.g_value).abs() <= 1e-9 * x.g_value.max(1e-300));
        }
    }

    #[test]
    fn gain_only_rescales() {
        let mut rng = seeded_rng(9);
        let s = random_scene(3, 4, &mut rng);
        let phi0 = random_phi(4, &mut rng);
        let (p1, a) = ascent(&s, &phi0, &quick()).unwrap();
        let (p2, b) = ascent(&s.with_alpha(s.alpha * 1e-6), &phi0, &quick()).unwrap();
        assert_eq!(a.iterations(), b.iterations());
        assert!((p1.matrix() - p2.matrix()).norm() <= 1e-9);
        assert!((b.final_g() / a.final_g() - 1e-12).abs() <= 1e-21);
    }

    #[test]
    fn random_baseline_never_beats_optimum() {
        let mut rng = seeded_rng(10);
        let s = random_scene(4, 6, &mut rng);
        let (_, t) = ascent_multistart(&s, Architecture::FullyConnected, &quick()).unwrap();
        let r = random_unitary_objective(&s, 3, 100).unwrap();
        assert!(r.max_g <= t.final_g());
        assert!(r.min_g <= r.mean_g && r.mean_g <= r.max_g);
        assert!(r.min_crb <= r.mean_crb && r.mean_crb <= r.max_crb);
        assert_eq!(r, random_unitary_objective(&s, 3, 100).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = seeded_rng(11);
        let s = random_scene(3, 4, &mut rng);
        let bad = OptimizerConfig {
            max_iters: 0,
            ..Default::default()
        };
        assert!(ascent(&s, &random_phi(4, &mut rng), &bad).is_err());
        assert!(ascent(&s, &random_phi(3, &mut rng), &quick()).is_err());
        assert!(matches!(ascent_grouped(&s, 3, &quick()), Err(Error::InvalidGroupSize { .. })));
        let dead = Scenario {
            link: RisBsLink::Explicit(CMatrix::zeros(3, 4)),
            ..s.clone()
        };
        assert!(matches!(
            ascent(&dead, &random_phi(4, &mut rng), &quick()),
            Err(Error::DegenerateChannel { .. })
        ));
        assert!(random_unitary_objective(&s, 0, 0).is_err());
    }

    #[test]
    fn restart_seeds_are_distinct() {
        assert_eq!(restart_seed(5, 0), 5);
        let seeds: std::collections::HashSet<u64> = (0..100).map(|i| restart_seed(5, i)).collect();
        assert_eq!(seeds.len(), 100);
    }
}
