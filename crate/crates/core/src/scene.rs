//! Physical scenario, steering vectors and the cascaded target-surface-BS channel.
//!
//! Array conventions (2-D, coordinates in meters):
//!
//! * the surface is a uniform linear array along `+x` whose broadside normal
//!   points to `-y`;
//! * the BS is a uniform linear array along `+y` whose broadside normal points
//!   to `+x`.
//!
//! Angles are measured from broadside. With `u` the unit propagation direction
//! of a path and `e` the array axis, the array sees `sin(beta) = e . u`. Under
//! this convention the far-field limit of the exact element-to-element channel
//! is exactly `a_BS(phi_BS) a_RIS(phi_R)^H`.
//!
//! Element spacings are in wavelengths, so the wavelength only enters through
//! path loss and the spherical-wave distances.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{seeded_rng, CMatrix, CVector, C64};
use crate::optim::scattering::{Architecture, ScatteringMatrix};

/// 2-D position in meters.
pub type Point = [f64; 2];

const RIS_AXIS: Point = [1.0, 0.0];
const RIS_NORMAL: Point = [0.0, -1.0];
const BS_AXIS: Point = [0.0, 1.0];
const BS_NORMAL: Point = [1.0, 0.0];

/// Relative tolerance used when checking stored angles against positions.
const GEOMETRY_TOLERANCE: f64 = 1e-9;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// `cos` that is exactly zero at `+-pi/2`, where the AOA stops being identifiable.
fn cos_exact(theta: f64) -> f64 {
    if theta.abs() == FRAC_PI_2 {
        0.0
    } else {
        theta.cos()
    }
}

/// `[1, e^{-j 2pi d sin(beta)}, ..., e^{-j 2pi d (n-1) sin(beta)}]`.
pub fn steering_vector(beta: f64, n: usize, spacing: f64) -> Result<CVector> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let step = -2.0 * PI * spacing * beta.sin();
    Ok(CVector::from_fn(n, |k, _| C64::from_polar(1.0, step * k as f64)))
}

/// Derivative of [`steering_vector`] with respect to the angle.
pub fn steering_derivative(theta: f64, n: usize, spacing: f64) -> Result<CVector> {
    let a = steering_vector(theta, n, spacing)?;
    let factor = C64::new(0.0, -2.0 * PI * spacing * cos_exact(theta));
    Ok(CVector::from_fn(n, |k, _| factor * (k as f64) * a[k]))
}

/// Where the target, the surface and the BS sit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positions {
    pub target: Point,
    pub ris: Point,
    pub bs: Point,
}

/// Model of the surface-to-BS channel matrix `G`.
#[derive(Debug, Clone, PartialEq)]
pub enum RisBsLink {
    /// Plane-wave model `G = a_BS(phi_BS) a_RIS(phi_R)^H`.
    ///
    /// `G` has rank one, so `h` and its angle derivative are both multiples of
    /// `a_BS`: the angle is then not identifiable jointly with the unknown
    /// complex gain and the objective is identically zero.
    FarField,
    /// Exact element-to-element phases `exp(-j 2pi (|b_m - r_n| - |b_0 - r_0|) / lambda)`
    /// from the positions. Requires `positions`.
    SphericalWave,
    /// A given `N_BS x N_R` matrix.
    Explicit(CMatrix),
}

/// How the phase of the complex path gain is chosen from geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPhase {
    Zero,
    Fixed(f64),
    /// Uniform on `[0, 2pi)` from the given seed.
    Seeded(u64),
}

impl AlphaPhase {
    pub fn resolve(&self) -> f64 {
        match *self {
            AlphaPhase::Zero => 0.0,
            AlphaPhase::Fixed(p) => p,
            AlphaPhase::Seeded(seed) => seeded_rng(seed).random_range(0.0..2.0 * PI),
        }
    }
}

/// The full parameter set of one sensing scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_bs: usize,
    pub n_r: usize,
    /// BS antenna spacing in wavelengths.
    pub d_bs: f64,
    /// Surface element spacing in wavelengths.
    pub d_ris: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// AOA of the target-surface path, radians from the surface broadside.
    pub theta: f64,
    /// AOD of the surface-BS path at the surface.
    pub phi_r: f64,
    /// AOA of the surface-BS path at the BS.
    pub phi_bs: f64,
    pub alpha: C64,
    /// Transmit power in watts.
    pub power: f64,
    /// Noise power in watts.
    pub noise_power: f64,
    pub slots: usize,
    pub pathloss_exponent: f64,
    /// Two-hop amplitude gain at 1 m per hop.
    pub reference_gain: f64,
    pub positions: Option<Positions>,
    pub link: RisBsLink,
}

impl Scenario {
    /// Plane-wave scenario from angles alone, with unit spacings of half a
    /// wavelength, `P = 20 dBm`, `sigma^2 = -120 dBm` and `L = 256`.
    pub fn from_angles(
        n_bs: usize,
        n_r: usize,
        theta: f64,
        phi_r: f64,
        phi_bs: f64,
        alpha: C64,
    ) -> Self {
        let wavelength = 0.1;
        Self {
            n_bs,
            n_r,
            d_bs: 0.5,
            d_ris: 0.5,
            wavelength,
            theta,
            phi_r,
            phi_bs,
            alpha,
            power: dbm_to_watts(20.0),
            noise_power: dbm_to_watts(-120.0),
            slots: 256,
            pathloss_exponent: 2.0,
            reference_gain: default_reference_gain(wavelength),
            positions: None,
            link: RisBsLink::FarField,
        }
    }

    /// The reference deployment: BS at `[-10, 0]`, surface at `[0, 20]`,
    /// target at `[5, 0]`, 8 BS antennas, spherical-wave surface-BS channel.
    pub fn reference(n_r: usize) -> Result<Self> {
        let base = Scenario {
            link: RisBsLink::SphericalWave,
            ..Scenario::from_angles(8, n_r, 0.0, 0.0, 0.0, C64::new(1.0, 0.0))
        };
        geometry_to_scene([5.0, 0.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidScenario(msg));
        if self.n_bs == 0 || self.n_r == 0 || self.slots == 0 {
            return fail("n_bs, n_r and slots must be at least 1".into());
        }
        for (name, v) in [
            ("power", self.power),
            ("noise_power", self.noise_power),
            ("wavelength", self.wavelength),
            ("d_bs", self.d_bs),
            ("d_ris", self.d_ris),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.pathloss_exponent.is_finite() && self.reference_gain.is_finite()) {
            return fail("path-loss parameters must be finite".into());
        }
        if !(self.theta.is_finite() && self.theta.abs() <= FRAC_PI_2) {
            return fail(format!("theta {} outside [-pi/2, pi/2]", self.theta));
        }
        for (name, v) in [("phi_r", self.phi_r), ("phi_bs", self.phi_bs)] {
            if !(v.is_finite() && v.abs() < FRAC_PI_2) {
                return fail(format!("{name} {v} outside (-pi/2, pi/2)"));
            }
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return fail("alpha must be finite".into());
        }
        if let Some(pos) = self.positions {
            let geo = GeometryAngles::from_positions(&pos)?;
            let gain = two_hop_gain(self, &geo);
            let consistent = (self.theta - geo.theta).abs() <= GEOMETRY_TOLERANCE
                && (self.phi_r - geo.phi_r).abs() <= GEOMETRY_TOLERANCE
                && (self.phi_bs - geo.phi_bs).abs() <= GEOMETRY_TOLERANCE
                && (self.alpha.norm() - gain).abs() <= GEOMETRY_TOLERANCE * gain;
            if !consistent {
                return fail("angles or |alpha| disagree with the stored positions".into());
            }
        }
        match &self.link {
            RisBsLink::SphericalWave if self.positions.is_none() => {
                fail("spherical-wave link requires positions".into())
            }
            RisBsLink::Explicit(g) if g.shape() != (self.n_bs, self.n_r) => fail(format!(
                "explicit G is {}x{}, expected {}x{}",
                g.nrows(),
                g.ncols(),
                self.n_bs,
                self.n_r
            )),
            RisBsLink::Explicit(g) if g.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) => {
                fail("explicit G has non-finite entries".into())
            }
            _ => Ok(()),
        }
    }

    /// The surface-to-BS matrix `G`.
    pub fn ris_bs_matrix(&self) -> Result<CMatrix> {
        match &self.link {
            RisBsLink::FarField => {
                let a_bs = steering_vector(self.phi_bs, self.n_bs, self.d_bs)?;
                let a_phi = steering_vector(self.phi_r, self.n_r, self.d_ris)?;
                Ok(&a_bs * a_phi.adjoint())
            }
            RisBsLink::SphericalWave => {
                let pos = self.positions.ok_or_else(|| {
                    Error::InvalidScenario("spherical-wave link requires positions".into())
                })?;
                Ok(spherical_wave_matrix(self, &pos))
            }
            RisBsLink::Explicit(g) => Ok(g.clone()),
        }
    }

    /// `Phi`-independent part of the channel.
    pub fn static_channel(&self) -> Result<StaticChannel> {
        self.validate()?;
        Ok(StaticChannel {
            a_bs: steering_vector(self.phi_bs, self.n_bs, self.d_bs)?,
            a_ris_theta: steering_vector(self.theta, self.n_r, self.d_ris)?,
            a_ris_phi: steering_vector(self.phi_r, self.n_r, self.d_ris)?,
            a_ris_dot: steering_derivative(self.theta, self.n_r, self.d_ris)?,
            g_mat: self.ris_bs_matrix()?,
            alpha: self.alpha,
        })
    }

    /// Copy with the path gain replaced.
    pub fn with_alpha(&self, alpha: C64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }
}

pub fn default_reference_gain(wavelength: f64) -> f64 {
    (wavelength / (4.0 * PI)).powi(2)
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

fn along(origin: Point, axis: Point, offset: f64) -> Point {
    [origin[0] + axis[0] * offset, origin[1] + axis[1] * offset]
}

struct GeometryAngles {
    theta: f64,
    phi_r: f64,
    phi_bs: f64,
    d_target_ris: f64,
    d_ris_bs: f64,
}

impl GeometryAngles {
    fn from_positions(pos: &Positions) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidGeometry(msg.into()));
        let t_to_r = sub(pos.ris, pos.target);
        let r_to_b = sub(pos.bs, pos.ris);
        let d1 = norm(t_to_r);
        let d2 = norm(r_to_b);
        if d1 == 0.0 || d2 == 0.0 || norm(sub(pos.bs, pos.target)) == 0.0 {
            return bad("positions must be pairwise distinct");
        }
        if !(d1.is_finite() && d2.is_finite()) {
            return bad("positions must be finite");
        }
        // target and BS must lie in front of the surface, the surface in front of the BS
        if dot(sub(pos.target, pos.ris), RIS_NORMAL) <= 0.0 {
            return bad("target is not in front of the surface (angle outside (-pi/2, pi/2))");
        }
        if dot(r_to_b, RIS_NORMAL) <= 0.0 {
            return bad("BS is not in front of the surface (angle outside (-pi/2, pi/2))");
        }
        if dot(sub(pos.ris, pos.bs), BS_NORMAL) <= 0.0 {
            return bad("surface is not in front of the BS (angle outside (-pi/2, pi/2))");
        }
        let u_tr = [t_to_r[0] / d1, t_to_r[1] / d1];
        let u_rb = [r_to_b[0] / d2, r_to_b[1] / d2];
        Ok(Self {
            theta: dot(RIS_AXIS, u_tr).clamp(-1.0, 1.0).asin(),
            phi_r: dot(RIS_AXIS, u_rb).clamp(-1.0, 1.0).asin(),
            phi_bs: dot(BS_AXIS, u_rb).clamp(-1.0, 1.0).asin(),
            d_target_ris: d1,
            d_ris_bs: d2,
        })
    }
}

/// `g0 / (d1^{eps/2} d2^{eps/2})`: amplitude of the product of two hops whose
/// power decays as `d^-eps`.
fn two_hop_gain(scene: &Scenario, geo: &GeometryAngles) -> f64 {
    let half = scene.pathloss_exponent / 2.0;
    scene.reference_gain / (geo.d_target_ris.powf(half) * geo.d_ris_bs.powf(half))
}

/// Fills angles, `alpha` and positions of `base` from a 2-D layout.
pub fn geometry_to_scene(
    target: Point,
    ris: Point,
    bs: Point,
    base: &Scenario,
    phase: AlphaPhase,
) -> Result<Scenario> {
    let positions = Positions { target, ris, bs };
    let geo = GeometryAngles::from_positions(&positions)?;
    let mut scene = base.clone();
    scene.theta = geo.theta;
    scene.phi_r = geo.phi_r;
    scene.phi_bs = geo.phi_bs;
    scene.alpha = C64::from_polar(two_hop_gain(&scene, &geo), phase.resolve());
    scene.positions = Some(positions);
    scene.validate()?;
    Ok(scene)
}

/// Distance between the reference surface element and reference BS antenna.
pub fn ris_bs_distance(pos: &Positions) -> f64 {
    norm(sub(pos.bs, pos.ris))
}

fn spherical_wave_matrix(scene: &Scenario, pos: &Positions) -> CMatrix {
    let lambda = scene.wavelength;
    let reference = ris_bs_distance(pos);
    CMatrix::from_fn(scene.n_bs, scene.n_r, |m, n| {
        let b = along(pos.bs, BS_AXIS, m as f64 * scene.d_bs * lambda);
        let r = along(pos.ris, RIS_AXIS, n as f64 * scene.d_ris * lambda);
        let excess = norm(sub(b, r)) - reference;
        C64::from_polar(1.0, -2.0 * PI * excess / lambda)
    })
}

/// `Phi`-independent quantities of one scenario: steering vectors, their
/// derivative, `G` and `alpha`.
#[derive(Debug, Clone)]
pub struct StaticChannel {
    pub a_bs: CVector,
    pub a_ris_theta: CVector,
    pub a_ris_phi: CVector,
    pub a_ris_dot: CVector,
    pub g_mat: CMatrix,
    pub alpha: C64,
}

impl StaticChannel {
    /// `(h, h_dot)` from `Phi a` and `Phi a_dot`.
    pub fn from_projected(&self, phi_a: &CVector, phi_a_dot: &CVector) -> (CVector, CVector) {
        let h = (&self.g_mat * phi_a) * self.alpha;
        let h_dot = (&self.g_mat * phi_a_dot) * self.alpha;
        (h, h_dot)
    }

    pub fn bundle(&self, phi: &CMatrix) -> Result<ChannelBundle> {
        let n_r = self.a_ris_theta.len();
        if phi.shape() != (n_r, n_r) {
            return Err(Error::ShapeMismatch {
                expected: format!("{n_r}x{n_r}"),
                got: format!("{}x{}", phi.nrows(), phi.ncols()),
            });
        }
        let (h, h_dot) = self.from_projected(&(phi * &self.a_ris_theta), &(phi * &self.a_ris_dot));
        Ok(ChannelBundle {
            a_bs: self.a_bs.clone(),
            a_ris_theta: self.a_ris_theta.clone(),
            a_ris_phi: self.a_ris_phi.clone(),
            a_ris_dot: self.a_ris_dot.clone(),
            g_mat: self.g_mat.clone(),
            alpha: self.alpha,
            h,
            h_dot,
        })
    }
}

/// All channel quantities for one `(Scenario, Phi)` pair.
#[derive(Debug, Clone)]
pub struct ChannelBundle {
    pub a_bs: CVector,
    pub a_ris_theta: CVector,
    pub a_ris_phi: CVector,
    pub a_ris_dot: CVector,
    pub g_mat: CMatrix,
    pub alpha: C64,
    /// `alpha G Phi a_RIS(theta)`
    pub h: CVector,
    /// `alpha G Phi a_RIS_dot(theta)`
    pub h_dot: CVector,
}

/// Channel for a feasible scattering matrix.
pub fn build_channel(scene: &Scenario, phi: &ScatteringMatrix) -> Result<ChannelBundle> {
    build_channel_unconstrained(scene, phi.matrix())
}

/// Channel for an arbitrary `N_R x N_R` matrix (no feasibility check). The
/// channel is defined on all of `C^{N_R x N_R}`, which finite-difference
/// checks rely on.
pub fn build_channel_unconstrained(scene: &Scenario, phi: &CMatrix) -> Result<ChannelBundle> {
    scene.static_channel()?.bundle(phi)
}

/// Random well-conditioned scene with an i.i.d. Gaussian `G`, for tests and
/// verification sweeps.
pub fn random_scene<R: Rng + ?Sized>(n_bs: usize, n_r: usize, rng: &mut R) -> Scenario {
    let theta = rng.random_range(-1.2..1.2);
    let phi_r = rng.random_range(-1.2..1.2);
    let phi_bs = rng.random_range(-1.2..1.2);
    let alpha = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..2.0 * PI));
    let g = crate::linalg::random_gaussian_matrix(n_bs, n_r, rng);
    Scenario {
        link: RisBsLink::Explicit(g),
        ..Scenario::from_angles(n_bs, n_r, theta, phi_r, phi_bs, alpha)
    }
}

/// Convenience: random fully-connected unitary of matching size.
pub fn random_phi<R: Rng + ?Sized>(n_r: usize, rng: &mut R) -> ScatteringMatrix {
    ScatteringMatrix::random_with(n_r, Architecture::FullyConnected, rng)
        .expect("n_r >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn steering_examples() {
        let a = steering_vector(0.0, 4, 0.5).unwrap();
        assert!(a.iter().all(|z| *z == C64::new(1.0, 0.0)));
        let a = steering_vector(FRAC_PI_2, 2, 0.5).unwrap();
        assert!(close(a[1], C64::new(-1.0, 0.0), 1e-15));
        // independent evaluation of exp(-j pi k sin(pi/6)) with sin(pi/6) = 1/2
        let a = steering_vector(PI / 6.0, 3, 0.5).unwrap();
        let expected = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0)];
        for (z, e) in a.iter().zip(expected) {
            assert!(close(*z, e, 1e-15));
        }
        assert!(steering_vector(0.1, 0, 0.5).is_err());
        assert!(steering_derivative(0.1, 0, 0.5).is_err());
    }

    #[test]
    fn derivative_endpoint_and_first_entry() {
        let d = steering_derivative(FRAC_PI_2, 6, 0.5).unwrap();
        assert!(d.iter().all(|z| z.norm() == 0.0));
        for theta in [-1.0, 0.2, 1.3] {
            assert_eq!(steering_derivative(theta, 5, 0.5).unwrap()[0], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (theta, n, d, step) = (0.3, 8, 0.5, 1e-6);
        let analytic = steering_derivative(theta, n, d).unwrap();
        let fd = (steering_vector(theta + step, n, d).unwrap()
            - steering_vector(theta - step, n, d).unwrap())
            / C64::new(2.0 * step, 0.0);
        assert!((&fd - &analytic).norm() / analytic.norm() <= 1e-7);
    }

    #[test]
    fn geometry_examples() {
        let base = Scenario::from_angles(4, 4, 0.0, 0.0, 0.0, C64::new(1.0, 0.0));
        let s = geometry_to_scene([0.0, 5.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Zero)
            .unwrap();
        assert_eq!(s.theta, 0.0);
        let pos = s.positions.unwrap();
        assert!((ris_bs_distance(&pos) - 500f64.sqrt()).abs() < 1e-12);
        // |alpha| = g0 / (d1 d2) at exponent 2
        let d1 = 15.0;
        let d2 = 500f64.sqrt();
        let expected = base.reference_gain / (d1 * d2);
        assert!((s.alpha.norm() - expected).abs() <= 1e-15 * expected.max(1.0));
        assert_eq!(s.alpha.im, 0.0);

        assert!(geometry_to_scene([0.0, 20.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Zero)
            .is_err());
        // target behind the surface
        assert!(geometry_to_scene([0.0, 30.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Zero)
            .is_err());
        let seeded =
            geometry_to_scene([3.0, 1.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Seeded(9))
                .unwrap();
        let again =
            geometry_to_scene([3.0, 1.0], [0.0, 20.0], [-10.0, 0.0], &base, AlphaPhase::Seeded(9))
                .unwrap();
        assert_eq!(seeded.alpha, again.alpha);
    }

    #[test]
    fn inconsistent_positions_rejected() {
        let mut s = Scenario::reference(8).unwrap();
        s.validate().unwrap();
        s.theta += 1e-3;
        assert!(s.validate().is_err());
    }

    #[test]
    fn spherical_wave_tends_to_far_field() {
        let base = Scenario {
            link: RisBsLink::SphericalWave,
            ..Scenario::from_angles(4, 6, 0.0, 0.0, 0.0, C64::new(1.0, 0.0))
        };
        let k = 1e5;
        let near = geometry_to_scene(
            [5.0 * k, 0.0],
            [0.0, 20.0 * k],
            [-10.0 * k, 0.0],
            &base,
            AlphaPhase::Zero,
        )
        .unwrap();
        let far = Scenario {
            link: RisBsLink::FarField,
            ..near.clone()
        };
        let g_near = near.ris_bs_matrix().unwrap();
        let g_far = far.ris_bs_matrix().unwrap();
        assert!((g_near - g_far).norm() < 1e-4);

        let close = Scenario {
            link: RisBsLink::SphericalWave,
            ..Scenario::reference(6).unwrap()
        };
        let g_close = close.ris_bs_matrix().unwrap();
        let g_plane = Scenario {
            link: RisBsLink::FarField,
            ..close
        }
        .ris_bs_matrix()
        .unwrap();
        assert!((g_close - g_plane).norm() > 1e-2);
    }

    #[test]
    fn far_field_is_rank_one_and_unidentifiable() {
        let s = Scenario::from_angles(4, 4, 0.4, -0.3, 0.2, C64::new(1.0, 0.5));
        let g = s.ris_bs_matrix().unwrap();
        let sv = g.clone().svd(false, false).singular_values;
        assert!(sv.iter().filter(|v| **v > 1e-9 * sv.max()).count() == 1);
        let phi = ScatteringMatrix::fully_connected(haar_random_unitary(4, 3).unwrap()).unwrap();
        let b = build_channel(&s, &phi).unwrap();
        // h_dot is parallel to h
        let c = b.h_dot.dotc(&b.h);
        let resid = b.h_dot.norm_squared() - c.norm_sqr() / b.h.norm_squared();
        assert!(resid.abs() <= 1e-12 * b.h_dot.norm_squared());
    }

    #[test]
    fn channel_examples() {
        let s = Scenario::from_angles(3, 1, 0.3, 0.2, -0.4, C64::new(0.7, -0.2));
        let phi = ScatteringMatrix::fully_connected(CMatrix::identity(1, 1)).unwrap();
        let b = build_channel(&s, &phi).unwrap();
        let expected = steering_vector(-0.4, 3, 0.5).unwrap() * s.alpha;
        assert!((&b.h - expected).norm() < 1e-15);

        let mut rng = seeded_rng(4);
        let mut s = random_scene(4, 4, &mut rng);
        s.theta = FRAC_PI_2;
        let phi = random_phi(4, &mut rng);
        let b = build_channel(&s, &phi).unwrap();
        assert!(b.h_dot.iter().all(|z| z.norm() == 0.0));

        let wrong = CMatrix::identity(3, 3);
        assert!(matches!(
            build_channel_unconstrained(&s, &wrong),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn h_dot_matches_central_difference() {
        let mut rng = seeded_rng(17);
        let s = random_scene(4, 6, &mut rng);
        let phi = random_phi(6, &mut rng);
        let step = 1e-6;
        let b = build_channel(&s, &phi).unwrap();
        let plus = Scenario {
            theta: s.theta + step,
            ..s.clone()
        };
        let minus = Scenario {
            theta: s.theta - step,
            ..s.clone()
        };
        let fd = (build_channel(&plus, &phi).unwrap().h - build_channel(&minus, &phi).unwrap().h)
            / C64::new(2.0 * step, 0.0);
        assert!((&fd - &b.h_dot).norm() / b.h_dot.norm() <= 1e-6);
    }

    #[test]
    fn reference_scene_is_valid() {
        let s = Scenario::reference(16).unwrap();
        assert_eq!(s.n_bs, 8);
        assert!(s.theta < 0.0 && s.theta > -FRAC_PI_2);
        assert!((s.phi_bs.sin() + 20.0 / 500f64.sqrt()).abs() < 1e-12);
        assert!((s.phi_r.sin() + 10.0 / 500f64.sqrt()).abs() < 1e-12);
    }
}
