//! Signal synthesis, likelihood and maximum-likelihood AOA estimation.
//!
//! Observations follow `Y = sqrt(P) h(Phi) x^T + N` with `x[l]` the unit-modulus
//! pilot of slot `l` and `N` i.i.d. `CN(0, sigma^2)`.
//!
//! The estimator concentrates out the complex gain: for a candidate angle the
//! gain maximizing the likelihood is closed-form, leaving a 1-D search over
//! `|u^H Y x*|^2 / ||u||^2` with `u(theta) = G Phi a_RIS(theta)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{crb_theta, fisher_scale, objective_g, EPS_CHANNEL};
use crate::linalg::{seeded_rng, CMatrix, CVector, C64};
use crate::optim::ascent::restart_seed;
use crate::optim::ScatteringMatrix;
use crate::scene::{build_channel, steering_vector, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pilots {
    #[default]
    Ones,
    /// Seeded `(+-1 +- j)/sqrt(2)` symbols.
    Qpsk,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthesisOptions {
    pub pilots: Pilots,
    /// Drop the noise term entirely.
    pub noiseless: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationBlock {
    /// `N_BS x L`
    pub y: CMatrix,
    /// `x[l]`, one per slot
    pub pilots: CVector,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    pub alpha_hat: C64,
    pub concentrated_loglik: f64,
}

pub fn synthesize(scene: &Scenario, phi: &ScatteringMatrix, seed: u64) -> Result<ObservationBlock> {
    synthesize_with(scene, phi, seed, SynthesisOptions::default())
}

pub fn synthesize_with(
    scene: &Scenario,
    phi: &ScatteringMatrix,
    seed: u64,
    options: SynthesisOptions,
) -> Result<ObservationBlock> {
    let bundle = build_channel(scene, phi)?;
    let mut rng = seeded_rng(seed);
    let slots = scene.slots;
    let pilots = match options.pilots {
        Pilots::Ones => CVector::from_element(slots, C64::new(1.0, 0.0)),
        Pilots::Qpsk => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            CVector::from_fn(slots, |_, _| {
                let re = if rng.random::<bool>() { s } else { -s };
                let im = if rng.random::<bool>() { s } else { -s };
                C64::new(re, im)
            })
        }
    };
    let mut y = &bundle.h * pilots.transpose() * C64::new(scene.power.sqrt(), 0.0);
    if !options.noiseless {
        let sd = (scene.noise_power / 2.0).sqrt();
        for z in y.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += C64::new(sd * re, sd * im);
        }
    }
    Ok(ObservationBlock { y, pilots, seed })
}

fn check_obs(obs: &ObservationBlock, scene: &Scenario) -> Result<()> {
    if obs.y.shape() != (scene.n_bs, scene.slots) || obs.pilots.len() != scene.slots {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", scene.n_bs, scene.slots),
            got: format!("{}x{}", obs.y.nrows(), obs.y.ncols()),
        });
    }
    Ok(())
}

/// `ln f(Y | theta, alpha)` including the constant `-N_BS L ln(pi sigma^2)`,
/// from the residual `||Y - sqrt(P) h x^T||_F^2 / sigma^2`.
pub fn log_likelihood(
    obs: &ObservationBlock,
    theta: f64,
    alpha: C64,
    phi: &ScatteringMatrix,
    scene: &Scenario,
) -> Result<f64> {
    check_obs(obs, scene)?;
    let h = candidate_channel(theta, alpha, phi, scene)?;
    Ok(log_normalizer(scene) - residual_norm2(obs, &h, scene.power.sqrt()) / scene.noise_power)
}

/// Same value as [`log_likelihood`] in expanded form
/// `-(||Y||^2 - 2 sqrt(P) Re(h^H Y x*) + P ||h||^2 ||x||^2) / sigma^2`.
///
/// The three terms nearly cancel at high SNR, so this loses accuracy there;
/// it is kept as a cross-check of the residual form.
pub fn log_likelihood_expanded(
    obs: &ObservationBlock,
    theta: f64,
    alpha: C64,
    phi: &ScatteringMatrix,
    scene: &Scenario,
) -> Result<f64> {
    check_obs(obs, scene)?;
    let h = candidate_channel(theta, alpha, phi, scene)?;
    let y_x = &obs.y * obs.pilots.map(|z| z.conj());
    let cross = h.dotc(&y_x).re;
    let quad = scene.power * h.norm_squared() * obs.pilots.norm_squared();
    let exponent = obs.y.norm_squared() - 2.0 * scene.power.sqrt() * cross + quad;
    Ok(log_normalizer(scene) - exponent / scene.noise_power)
}

fn candidate_channel(theta: f64, alpha: C64, phi: &ScatteringMatrix, scene: &Scenario) -> Result<CVector> {
    let candidate = Scenario {
        theta,
        alpha,
        positions: None,
        ..scene.clone()
    };
    Ok(build_channel(&candidate, phi)?.h)
}

/// `||Y - sqrt_p h x^T||_F^2`, accumulated entry by entry.
fn residual_norm2(obs: &ObservationBlock, h: &CVector, sqrt_p: f64) -> f64 {
    let mut acc = 0.0;
    for (l, x) in obs.pilots.iter().enumerate() {
        for (m, hm) in h.iter().enumerate() {
            acc += (obs.y[(m, l)] - hm * x * sqrt_p).norm_sqr();
        }
    }
    acc
}

fn log_normalizer(scene: &Scenario) -> f64 {
    -((scene.n_bs * scene.slots) as f64) * (PI * scene.noise_power).ln()
}

/// Uniform angle grid for the coarse search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Golden-section search between the neighbours of the best grid point
    /// after the parabolic step.
    pub polish: bool,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            lo: -FRAC_PI_2 + 0.01,
            hi: FRAC_PI_2 - 0.01,
            points: 2001,
            polish: true,
        }
    }
}

impl ThetaGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidArgument("empty angle grid".into()));
        }
        if !(self.lo > -FRAC_PI_2 && self.hi < FRAC_PI_2 && self.lo <= self.hi) {
            return Err(Error::InvalidArgument(format!(
                "grid [{}, {}] must lie inside (-pi/2, pi/2)",
                self.lo, self.hi
            )));
        }
        if self.points == 1 && self.lo != self.hi {
            return Err(Error::InvalidArgument("one-point grid needs lo == hi".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        if self.points > 1 {
            (self.hi - self.lo) / (self.points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.hi
        } else {
            self.lo + k as f64 * self.step()
        }
    }
}

/// Maximizer of `f` on `[lo, hi]` by golden-section search, assuming one peak.
fn golden_max<F: Fn(f64) -> Result<f64>>(mut lo: f64, mut hi: f64, f: F) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { x1 } else { x2 })
}

/// Precomputed `G Phi` and steering vectors for repeated estimation with one
/// scattering matrix.
pub struct MlEstimator {
    g_phi: CMatrix,
    grid: ThetaGrid,
    n_r: usize,
    d_ris: f64,
    /// `u(theta_k)` and `||u||^2` on the grid
    table: Vec<Option<(CVector, f64)>>,
    power_sqrt: f64,
}

impl MlEstimator {
    pub fn new(phi: &ScatteringMatrix, scene: &Scenario, grid: ThetaGrid) -> Result<Self> {
        grid.validate()?;
        let g = scene.ris_bs_matrix()?;
        if phi.dim() != scene.n_r {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", scene.n_r),
                got: format!("{0}x{0}", phi.dim()),
            });
        }
        let g_phi = g * phi.matrix();
        let table: Vec<Option<(CVector, f64)>> = (0..grid.points)
            .map(|k| {
                let a = steering_vector(grid.value(k), scene.n_r, scene.d_ris)?;
                let u = &g_phi * a;
                let nu = u.norm_squared();
                Ok((nu > EPS_CHANNEL).then_some((u, nu)))
            })
            .collect::<Result<_>>()?;
        if table.iter().all(Option::is_none) {
            return Err(Error::DegenerateChannel { norm_sq: 0.0 });
        }
        Ok(Self {
            g_phi,
            grid,
            n_r: scene.n_r,
            d_ris: scene.d_ris,
            table,
            power_sqrt: scene.power.sqrt(),
        })
    }

    fn u_at(&self, theta: f64) -> Result<(CVector, f64)> {
        let u = &self.g_phi * steering_vector(theta, self.n_r, self.d_ris)?;
        let nu = u.norm_squared();
        Ok((u, nu))
    }

    pub fn estimate(&self, obs: &ObservationBlock, scene: &Scenario) -> Result<EstimateResult> {
        check_obs(obs, scene)?;
        let z = &obs.y * obs.pilots.map(|p| p.conj());
        let score = |u: &CVector, nu: f64| u.dotc(&z).norm_sqr() / nu;
        let values: Vec<f64> = self
            .table
            .iter()
            .map(|e| e.as_ref().map_or(f64::NEG_INFINITY, |(u, nu)| score(u, *nu)))
            .collect();
        let (best, &best_val) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");

        // Candidates are ranked by the directly computed residual: at high SNR the
        // score above is flat to within rounding across the CRB width.
        let x_norm2 = obs.pilots.norm_squared();
        let residual_at = |theta: f64| -> Result<f64> {
            let (u, nu) = self.u_at(theta)?;
            if nu <= EPS_CHANNEL {
                return Ok(f64::INFINITY);
            }
            let alpha = u.dotc(&z) / (self.power_sqrt * x_norm2 * nu);
            Ok(residual_norm2(obs, &(&u * alpha), self.power_sqrt))
        };
        let mut theta_hat = self.grid.value(best);
        let mut best_resid = residual_at(theta_hat)?;
        let mut consider = |theta: f64, theta_hat: &mut f64| -> Result<()> {
            let r = residual_at(theta)?;
            if r < best_resid {
                *theta_hat = theta;
                best_resid = r;
            }
            Ok(())
        };
        if best > 0 && best + 1 < values.len() {
            let (fm, f0, fp) = (values[best - 1], best_val, values[best + 1]);
            let denom = fm - 2.0 * f0 + fp;
            if fm.is_finite() && fp.is_finite() && denom < 0.0 {
                let delta = (0.5 * (fm - fp) / denom).clamp(-0.5, 0.5);
                consider(theta_hat + delta * self.grid.step(), &mut theta_hat)?;
            }
        }
        if self.grid.polish && self.grid.points > 1 {
            let lo = self.grid.value(best.saturating_sub(1));
            let hi = self.grid.value((best + 1).min(self.grid.points - 1));
            let polished = golden_max(lo, hi, |t| Ok(-residual_at(t)?))?;
            consider(polished, &mut theta_hat)?;
        }
        let (u, nu) = self.u_at(theta_hat)?;
        let alpha_hat = u.dotc(&z) / (self.power_sqrt * x_norm2 * nu);
        let fitted = &u * alpha_hat;
        let concentrated_loglik = log_normalizer(scene)
            - residual_norm2(obs, &fitted, self.power_sqrt) / scene.noise_power;
        Ok(EstimateResult {
            theta_hat,
            alpha_hat,
            concentrated_loglik,
        })
    }
}

/// Concentrated maximum-likelihood estimate of `(theta, alpha)`; the angle and
/// gain stored in `scene` are ignored.
pub fn ml_estimate(
    obs: &ObservationBlock,
    phi: &ScatteringMatrix,
    scene: &Scenario,
    grid: ThetaGrid,
) -> Result<EstimateResult> {
    MlEstimator::new(phi, scene, grid)?.estimate(obs, scene)
}

/// Result of a Monte Carlo efficiency run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub mse: f64,
    pub bias: f64,
    pub crb: f64,
    /// `mse / crb`
    pub ratio: f64,
}

/// Sample MSE of the ML angle estimate over `trials` independent noise draws.
/// Trial `t` uses seed `restart_seed(seed, t)`.
pub fn monte_carlo_mse(
    scene: &Scenario,
    phi: &ScatteringMatrix,
    trials: usize,
    seed: u64,
    grid: ThetaGrid,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let crb = crb_theta(&build_channel(scene, phi)?, scene)?;
    let estimator = MlEstimator::new(phi, scene, grid)?;
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let obs = synthesize(scene, phi, restart_seed(seed, t))?;
            Ok(estimator.estimate(&obs, scene)?.theta_hat - scene.theta)
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let bias = errors.iter().sum::<f64>() / n;
    Ok(MonteCarloSummary {
        trials,
        mse,
        bias,
        crb,
        ratio: mse / crb,
    })
}

/// Noise power at which the CRB of `(scene, phi)` equals `target_crb`.
pub fn noise_for_crb(scene: &Scenario, phi: &ScatteringMatrix, target_crb: f64) -> Result<f64> {
    let g = objective_g(&build_channel(scene, phi)?)?;
    let unit = Scenario {
        noise_power: 1.0,
        ..scene.clone()
    };
    Ok(target_crb * fisher_scale(&unit) * g)
}
