//! JSON experiment configuration.
//!
//! Every field has a default, so `{}` is a valid document describing the
//! reference deployment (BS at `[-10, 0]` m, surface at `[0, 20]` m, target at
//! `[5, 0]` m, 8 BS antennas, 256 slots, -120 dBm noise, 20 dBm transmit power).
//! Unknown keys are rejected. Errors carry the line and column of the offending
//! token.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;
use crate::optim::OptimizerConfig;
use crate::scene::{dbm_to_watts, default_reference_gain, geometry_to_scene, AlphaPhase, Point, RisBsLink, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Invalid {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl ConfigError {
    /// Line of the error, if it points into the document.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Invalid { line, .. } => Some(*line),
            ConfigError::Read { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    /// Exact element-to-element distances.
    Spherical,
    /// Rank-one plane-wave model. The angle is not identifiable under it.
    FarField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_bs: usize,
    pub n_r: usize,
    pub slots: usize,
    pub power_dbm: f64,
    pub noise_power_dbm: f64,
    pub pathloss_exponent: f64,
    /// Meters.
    pub wavelength: f64,
    /// In wavelengths.
    pub d_bs: f64,
    pub d_ris: f64,
    pub target: Point,
    pub ris: Point,
    pub bs: Point,
    pub link: Link,
    /// Phase of the path gain in radians.
    pub alpha_phase: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_bs: 8,
            n_r: 16,
            slots: 256,
            power_dbm: 20.0,
            noise_power_dbm: -120.0,
            pathloss_exponent: 2.0,
            wavelength: 0.1,
            d_bs: 0.5,
            d_ris: 0.5,
            target: [5.0, 0.0],
            ris: [0.0, 20.0],
            bs: [-10.0, 0.0],
            link: Link::Spherical,
            alpha_phase: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> crate::Result<Scenario> {
        let base = Scenario {
            n_bs: self.n_bs,
            n_r: self.n_r,
            d_bs: self.d_bs,
            d_ris: self.d_ris,
            wavelength: self.wavelength,
            theta: 0.0,
            phi_r: 0.0,
            phi_bs: 0.0,
            alpha: C64::new(1.0, 0.0),
            power: dbm_to_watts(self.power_dbm),
            noise_power: dbm_to_watts(self.noise_power_dbm),
            slots: self.slots,
            pathloss_exponent: self.pathloss_exponent,
            reference_gain: default_reference_gain(self.wavelength),
            positions: None,
            link: match self.link {
                Link::Spherical => RisBsLink::SphericalWave,
                Link::FarField => RisBsLink::FarField,
            },
        };
        geometry_to_scene(
            self.target,
            self.ris,
            self.bs,
            &base,
            AlphaPhase::Fixed(self.alpha_phase),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Iteration cap of the ascent.
    Iterations,
    GroupSize,
    /// dBm.
    NoisePower,
    Slots,
    #[serde(rename = "n_r")]
    NR,
    /// Horizontal surface coordinate in meters; the vertical one stays fixed.
    RisXPosition,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Iterations => "iterations",
            Axis::GroupSize => "group_size",
            Axis::NoisePower => "noise_power",
            Axis::Slots => "slots",
            Axis::NR => "n_r",
            Axis::RisXPosition => "ris_x_position",
        }
    }

    fn integral(&self) -> bool {
        matches!(self, Axis::Iterations | Axis::GroupSize | Axis::Slots | Axis::NR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fully-connected (or group-connected on the group-size axis) ascent.
    Proposed,
    /// Average over Haar-random unitary matrices.
    RandomUnitary,
    /// Optimized diagonal (single-connected) surface.
    DiagonalBaseline,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::RandomUnitary, Scheme::DiagonalBaseline];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::RandomUnitary => "random_unitary",
            Scheme::DiagonalBaseline => "diagonal_baseline",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                format!("unknown scheme {s:?} (expected proposed, random_unitary or diagonal_baseline)")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// On the group-size axis, also start each group size from the optimum of
    /// the previous one when it nests (the previous size divides this one).
    #[serde(default = "yes")]
    pub nested_warm_start: bool,
}

fn yes() -> bool {
    true
}

/// Ascent parameters; restarts and seed live at the top level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AscentSettings {
    pub mu_init: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    pub max_doublings: usize,
}

impl Default for AscentSettings {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            mu_init: d.mu_init,
            epsilon: d.epsilon,
            max_iters: d.max_iters,
            max_halvings: d.max_halvings,
            max_doublings: d.max_doublings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Seeded random (scene, Phi) pairs for the finite-difference check.
    pub gradient_pairs: usize,
    pub fd_step: f64,
    pub gradient_tolerance: f64,
    pub schur_draws: usize,
    pub schur_tolerance: f64,
    pub scaling_tolerance: f64,
    /// Surface size of the ascent-integrity run on the configured scenario.
    pub ascent_n_r: usize,
    pub ascent_max_iters: usize,
    pub unitarity_tolerance: f64,
    pub skew_tolerance: f64,
    pub monotone_tolerance: f64,
    /// Seeded random scenes for the stationarity and optimality checks.
    pub stationarity_scenes: usize,
    pub stationarity_ratio: f64,
    /// Convergence tolerance of the stationarity runs. Starts near a critical
    /// point have a tiny initial gradient, and the relative-change test at 1e-6
    /// stops them at the optimum long before the ratio is met.
    pub stationarity_epsilon: f64,
    /// Allowed relative gap between the ascent and the closed-form optimum.
    pub optimality_gap: f64,
    pub mc_trials: usize,
    pub mc_n_r: usize,
    /// Noise is scaled so the CRB equals each target in turn. The first entry
    /// is the high-SNR point where the MSE must also lie below the upper bound.
    pub mc_crb_targets: Vec<f64>,
    pub mse_lower_ratio: f64,
    pub mse_upper_ratio: f64,
    /// Negative control: flip the sign of the analytic gradient.
    pub corrupt_gradient: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            gradient_pairs: 50,
            fd_step: 1e-6,
            gradient_tolerance: 1e-6,
            schur_draws: 1000,
            schur_tolerance: 1e-9,
            scaling_tolerance: 1e-12,
            ascent_n_r: 16,
            ascent_max_iters: 2000,
            unitarity_tolerance: 1e-9,
            skew_tolerance: 1e-10,
            monotone_tolerance: 1e-12,
            stationarity_scenes: 12,
            stationarity_ratio: 1e-4,
            stationarity_epsilon: 1e-12,
            optimality_gap: 1e-3,
            mc_trials: 200,
            mc_n_r: 8,
            mc_crb_targets: vec![1e-10, 1e-8, 1e-6, 1e-4],
            mse_lower_ratio: 0.8,
            mse_upper_ratio: 2.0,
            corrupt_gradient: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub sweep: Option<SweepConfig>,
    pub schemes: Vec<Scheme>,
    pub restarts: usize,
    pub seed: u64,
    /// Haar draws averaged by the random-unitary scheme.
    pub random_samples: usize,
    pub optimizer: AscentSettings,
    pub verify: VerifyConfig,
    pub output: PathBuf,
    /// Also write a gnuplot script next to each CSV.
    pub gnuplot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            sweep: None,
            schemes: Scheme::ALL.to_vec(),
            restarts: 4,
            seed: 0,
            random_samples: 100,
            optimizer: AscentSettings::default(),
            verify: VerifyConfig::default(),
            output: PathBuf::from("out"),
            gnuplot: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates a document. `origin` names it in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ConfigError::Invalid {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        })?;
        config.validate_in(text, origin)?;
        Ok(config)
    }

    /// Semantic checks, reported at the first occurrence of the offending key.
    fn validate_in(&self, text: &str, origin: &str) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| {
            let (line, column) = locate(text, key);
            Err(ConfigError::Invalid {
                origin: origin.to_string(),
                line,
                column,
                message,
            })
        };
        if self.schemes.is_empty() {
            return fail("schemes", "schemes must not be empty".into());
        }
        if self.restarts == 0 {
            return fail("restarts", "restarts must be at least 1".into());
        }
        if self.random_samples == 0 {
            return fail("random_samples", "random_samples must be at least 1".into());
        }
        if let Err(e) = self.optimizer_config().validate() {
            let message = e.to_string();
            let key = ["mu_init", "epsilon", "max_iters", "max_halvings", "max_doublings"]
                .into_iter()
                .find(|k| message.contains(k) && text.contains(&format!("\"{k}\"")))
                .unwrap_or("optimizer");
            return fail(key, message);
        }
        if let Err(e) = self.scenario.build() {
            return fail("scenario", e.to_string());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return fail("values", "sweep values must not be empty".into());
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return fail("values", "sweep values must be finite".into());
            }
            if sweep.values.windows(2).any(|w| w[0] >= w[1]) {
                return fail("values", "sweep values must be strictly increasing".into());
            }
            if sweep.axis.integral() && sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                return fail(
                    "values",
                    format!("{} values must be positive integers", sweep.axis.name()),
                );
            }
            if sweep.axis == Axis::GroupSize {
                if let Some(v) = sweep.values.iter().find(|v| !self.scenario.n_r.is_multiple_of(**v as usize)) {
                    return fail(
                        "values",
                        format!("group size {v} does not divide n_r = {}", self.scenario.n_r),
                    );
                }
            }
            if sweep.axis == Axis::RisXPosition {
                for &x in &sweep.values {
                    let moved = ScenarioConfig {
                        ris: [x, self.scenario.ris[1]],
                        ..self.scenario.clone()
                    };
                    if let Err(e) = moved.build() {
                        return fail("values", format!("surface at x = {x}: {e}"));
                    }
                }
            }
        }
        let v = &self.verify;
        if v.gradient_pairs == 0 || v.schur_draws == 0 || v.stationarity_scenes == 0 || v.mc_trials == 0 || v.ascent_n_r == 0 || v.mc_n_r == 0 {
            return fail("verify", "verify counts and sizes must be at least 1".into());
        }
        if v.mc_crb_targets.is_empty() || v.mc_crb_targets.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return fail("mc_crb_targets", "mc_crb_targets must be non-empty and positive".into());
        }
        if !(v.stationarity_epsilon > 0.0 && v.stationarity_epsilon < 1.0) {
            return fail("stationarity_epsilon", "stationarity_epsilon must lie in (0, 1)".into());
        }
        if !(crate::fd::MIN_STEP..=crate::fd::MAX_STEP).contains(&v.fd_step) {
            return fail("fd_step", format!("fd_step {} outside [1e-8, 1e-4]", v.fd_step));
        }
        Ok(())
    }

    /// Ascent configuration with the top-level restarts and seed.
    pub fn optimizer_config(&self) -> OptimizerConfig {
        let o = &self.optimizer;
        OptimizerConfig {
            mu_init: o.mu_init,
            epsilon: o.epsilon,
            max_iters: o.max_iters,
            max_halvings: o.max_halvings,
            max_doublings: o.max_doublings,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

/// 1-based line and column of the first `"key"` in `text`, or `(1, 1)`.
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    for (i, line) in text.lines().enumerate() {
        if let Some(col) = line.find(&needle) {
            return (i + 1, col + 1);
        }
    }
    (1, 1)
}
