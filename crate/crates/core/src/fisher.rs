//! Fisher information for `xi = [theta, gain perturbation]` and the CRB on theta.
//!
//! The nuisance block is parameterized by a relative perturbation of the path
//! gain, `alpha -> alpha (1 + a + j b)` evaluated at `a = b = 0`. Its score
//! vectors are `h` and `j h`, which gives the compact blocks
//!
//! ```text
//! F_tt = c ||h_dot||^2
//! F_ta = c [Re(h_dot^H h), -Im(h_dot^H h)]
//! F_aa = c ||h||^2 I_2,            c = 2 L P / sigma^2
//! ```
//!
//! The theta entry of the inverse (the Schur complement) does not depend on how
//! the complex gain is parameterized, so the CRB is the same as for
//! `[Re alpha, Im alpha]`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::scene::{ChannelBundle, Scenario};

/// `||h||^2` at or below this is a degenerate scene.
pub const EPS_CHANNEL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherBlocks {
    pub f_theta_theta: f64,
    pub f_theta_alpha: [f64; 2],
    pub f_alpha_alpha: [[f64; 2]; 2],
    /// `+inf` when theta is not identifiable.
    pub crb_theta: f64,
    pub g_value: f64,
}

impl FisherBlocks {
    /// Full symmetric 3x3 FIM.
    pub fn assembled(&self) -> Matrix3<f64> {
        let [ta, tb] = self.f_theta_alpha;
        let aa = self.f_alpha_alpha;
        Matrix3::new(
            self.f_theta_theta, ta, tb, //
            ta, aa[0][0], aa[0][1], //
            tb, aa[1][0], aa[1][1],
        )
    }
}

/// `2 L P / sigma^2`.
pub fn fisher_scale(scene: &Scenario) -> f64 {
    2.0 * scene.slots as f64 * scene.power / scene.noise_power
}

fn check_finite(v: &CVector) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `||h_dot||^2 - |h_dot^H h|^2 / ||h||^2`, set to zero when it is below the
/// rounding error of the difference.
pub fn objective_from(h: &CVector, h_dot: &CVector) -> Result<f64> {
    check_finite(h)?;
    check_finite(h_dot)?;
    let b = h.norm_squared();
    if b <= EPS_CHANNEL {
        return Err(Error::DegenerateChannel { norm_sq: b });
    }
    let c = h_dot.dotc(h);
    let d = h_dot.norm_squared();
    let g = d - c.norm_sqr() / b;
    // below the rounding floor of the subtraction the two terms are equal
    Ok(if g <= 8.0 * f64::EPSILON * d { 0.0 } else { g })
}

/// The maximization objective `g(Phi)`.
pub fn objective_g(bundle: &ChannelBundle) -> Result<f64> {
    objective_from(&bundle.h, &bundle.h_dot)
}

/// `sigma^2 / (2 L P g)`, or `+inf` when `g = 0`.
pub fn crb_from_objective(scene: &Scenario, g: f64) -> f64 {
    if g > 0.0 {
        1.0 / (fisher_scale(scene) * g)
    } else {
        f64::INFINITY
    }
}

pub fn crb_theta(bundle: &ChannelBundle, scene: &Scenario) -> Result<f64> {
    Ok(crb_from_objective(scene, objective_g(bundle)?))
}

pub fn fim_blocks(bundle: &ChannelBundle, scene: &Scenario) -> Result<FisherBlocks> {
    let g = objective_g(bundle)?;
    let c = fisher_scale(scene);
    let cross = bundle.h_dot.dotc(&bundle.h);
    let b = bundle.h.norm_squared();
    Ok(FisherBlocks {
        f_theta_theta: c * bundle.h_dot.norm_squared(),
        f_theta_alpha: [c * cross.re, -c * cross.im],
        f_alpha_alpha: [[c * b, 0.0], [0.0, c * b]],
        crb_theta: crb_from_objective(scene, g),
        g_value: g,
    })
}

/// `[F^{-1}]_{11}` by explicit inversion of the assembled FIM; `+inf` if it is
/// singular. Cross-check for the closed form.
pub fn crb_via_inverse(blocks: &FisherBlocks) -> f64 {
    match blocks.assembled().try_inverse() {
        Some(inv) if inv[(0, 0)].is_finite() && inv[(0, 0)] > 0.0 => inv[(0, 0)],
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{seeded_rng, C64};
    use crate::scene::{build_channel, random_phi, random_scene};

    #[test]
    fn endpoint_has_no_theta_information() {
        let mut rng = seeded_rng(1);
        let mut s = random_scene(4, 4, &mut rng);
        s.theta = std::f64::consts::FRAC_PI_2;
        let b = build_channel(&s, &random_phi(4, &mut rng)).unwrap();
        let f = fim_blocks(&b, &s).unwrap();
        assert_eq!(f.f_theta_theta, 0.0);
        assert_eq!(f.f_theta_alpha, [0.0, 0.0]);
        assert_eq!(f.g_value, 0.0);
        assert_eq!(f.crb_theta, f64::INFINITY);
        assert_eq!(crb_theta(&b, &s).unwrap(), f64::INFINITY);
    }

    #[test]
    fn slots_scale_blocks_linearly() {
        let mut rng = seeded_rng(2);
        let s = random_scene(4, 4, &mut rng);
        let phi = random_phi(4, &mut rng);
        let b = build_channel(&s, &phi).unwrap();
        let s2 = Scenario {
            slots: 2 * s.slots,
            ..s.clone()
        };
        let f1 = fim_blocks(&b, &s).unwrap();
        let f2 = fim_blocks(&b, &s2).unwrap();
        assert_eq!(f2.f_theta_theta, 2.0 * f1.f_theta_theta);
        assert_eq!(f2.f_alpha_alpha[0][0], 2.0 * f1.f_alpha_alpha[0][0]);
        assert_eq!(f2.f_theta_alpha[1], 2.0 * f1.f_theta_alpha[1]);
        assert_eq!(f2.crb_theta, 0.5 * f1.crb_theta);

        let noisy = Scenario {
            noise_power: 2.0 * s.noise_power,
            ..s.clone()
        };
        assert_eq!(crb_theta(&b, &noisy).unwrap(), 2.0 * f1.crb_theta);
    }

    #[test]
    fn objective_invariances() {
        let mut rng = seeded_rng(3);
        let s = random_scene(3, 5, &mut rng);
        let phi = random_phi(5, &mut rng);
        let g = objective_g(&build_channel(&s, &phi).unwrap()).unwrap();
        let rotated = objective_g(&build_channel(&s, &phi.with_global_phase(1.234)).unwrap()).unwrap();
        assert!((g - rotated).abs() <= 1e-12 * g);
        let doubled = s.with_alpha(s.alpha * 2.0);
        let g4 = objective_g(&build_channel(&doubled, &phi).unwrap()).unwrap();
        assert!((g4 - 4.0 * g).abs() <= 1e-12 * g);
        let crb = crb_theta(&build_channel(&s, &phi).unwrap(), &s).unwrap();
        assert!((crb * g * fisher_scale(&s) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_channel_is_an_error() {
        let h = CVector::zeros(3);
        let hd = CVector::from_element(3, C64::new(1.0, 0.0));
        assert!(matches!(
            objective_from(&h, &hd),
            Err(Error::DegenerateChannel { .. })
        ));
        let mut bad = hd.clone();
        bad[0] = C64::new(f64::NAN, 0.0);
        assert!(matches!(objective_from(&hd, &bad), Err(Error::NonFinite)));
    }

    #[test]
    fn inverse_matches_closed_form() {
        let mut rng = seeded_rng(4);
        let s = random_scene(8, 8, &mut rng);
        let b = build_channel(&s, &random_phi(8, &mut rng)).unwrap();
        let f = fim_blocks(&b, &s).unwrap();
        let inv = crb_via_inverse(&f);
        assert!((inv - f.crb_theta).abs() <= 1e-9 * f.crb_theta);
    }
}
