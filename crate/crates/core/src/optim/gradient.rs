//! Euclidean, Riemannian and geodesic gradients of the objective
//! `g(Phi) = ||h_dot||^2 - |tr A|^2 / tr B` with `A = h h_dot^H`, `B = h h^H`.
//!
//! The Euclidean gradient is the Wirtinger derivative `dg/dPhi*`, assembled
//! from the differentials of the three pieces `g1 = ||h_dot||^2`,
//! `g3 = |tr A|^2` and `tr B`:
//!
//! ```text
//! Omega  = (tr A)* a a_dot^H + (tr A) a_dot a^H
//! L2     = (|alpha|^2 G^H G Phi a_dot a_dot^H)^T
//! C2     = (|alpha|^2 G^H G Phi Omega)^T
//! D2     = (|alpha|^2 G^H G Phi a a^H)^T
//! dg/dPhi* = [L2 - C2 / tr B + |tr A|^2 D2 / (tr B)^2]^T
//! ```
//!
//! `G^H G Phi a = G^H h / alpha`, so every term is an outer product and the
//! whole gradient costs `O(N_BS N_R + N_R^2)` once `h` and `h_dot` are known.

use crate::error::{Error, Result};
use crate::fisher::EPS_CHANNEL;
use crate::linalg::{unitarity_report, CMatrix, CVector, C64};
use crate::optim::scattering::{ScatteringMatrix, UNITARY_TOLERANCE};
use crate::scene::{Scenario, StaticChannel};

/// Intermediate quantities of the gradient chain for one `Phi`.
#[derive(Debug, Clone)]
pub struct GradientWorkspace {
    /// `tr(h h_dot^H) = h_dot^H h`
    pub a_mat: C64,
    /// `tr(h h^H) = ||h||^2`
    pub b_tr: f64,
    pub omega: CMatrix,
    pub lambda2: CMatrix,
    pub c2: CMatrix,
    pub d2: CMatrix,
    /// `dg/dPhi*`
    pub euclidean: CMatrix,
}

impl GradientWorkspace {
    pub fn compute(channel: &StaticChannel, phi: &CMatrix) -> Result<Self> {
        let (h, h_dot) = channel.from_projected(
            &(phi * &channel.a_ris_theta),
            &(phi * &channel.a_ris_dot),
        );
        Self::from_channel(channel, &h, &h_dot)
    }

    pub(crate) fn from_channel(
        channel: &StaticChannel,
        h: &CVector,
        h_dot: &CVector,
    ) -> Result<Self> {
        let b_tr = h.norm_squared();
        if !b_tr.is_finite() {
            return Err(Error::NonFinite);
        }
        if b_tr <= EPS_CHANNEL {
            return Err(Error::DegenerateChannel { norm_sq: b_tr });
        }
        let a = &channel.a_ris_theta;
        let a_dot = &channel.a_ris_dot;
        let alpha_conj = channel.alpha.conj();
        let tr_a = h_dot.dotc(h);

        // |alpha|^2 G^H G Phi x  =  alpha* G^H (alpha G Phi x)
        let gh_h = channel.g_mat.ad_mul(h) * alpha_conj;
        let gh_hdot = channel.g_mat.ad_mul(h_dot) * alpha_conj;

        let omega = a * a_dot.adjoint() * tr_a.conj() + a_dot * a.adjoint() * tr_a;
        let lambda2 = (&gh_hdot * a_dot.adjoint()).transpose();
        // G^H G Phi Omega = (G^H G Phi a)(tr A)* a_dot^H + (G^H G Phi a_dot)(tr A) a^H
        let c2 = (&gh_h * a_dot.adjoint() * tr_a.conj() + &gh_hdot * a.adjoint() * tr_a)
            .transpose();
        let d2 = (&gh_h * a.adjoint()).transpose();

        let abs_a2 = tr_a.norm_sqr();
        let inner = &lambda2 - &c2 * C64::new(1.0 / b_tr, 0.0)
            + &d2 * C64::new(abs_a2 / (b_tr * b_tr), 0.0);
        Ok(Self {
            a_mat: tr_a,
            b_tr,
            omega,
            lambda2,
            c2,
            d2,
            euclidean: inner.transpose(),
        })
    }
}

/// `dg/dPhi*` at a feasible scattering matrix.
pub fn euclidean_gradient(phi: &ScatteringMatrix, scene: &Scenario) -> Result<CMatrix> {
    let channel = scene.static_channel()?;
    Ok(GradientWorkspace::compute(&channel, phi.matrix())?.euclidean)
}

/// `dg/dPhi*` at any matrix of the right shape.
pub fn euclidean_gradient_unconstrained(phi: &CMatrix, scene: &Scenario) -> Result<CMatrix> {
    let channel = scene.static_channel()?;
    let n = scene.n_r;
    if phi.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", phi.nrows(), phi.ncols()),
        });
    }
    Ok(GradientWorkspace::compute(&channel, phi)?.euclidean)
}

fn check_pair(phi: &CMatrix, gamma: &CMatrix) -> Result<()> {
    if phi.nrows() != phi.ncols() || phi.shape() != gamma.shape() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", phi.nrows(), phi.nrows()),
            got: format!("{}x{}", gamma.nrows(), gamma.ncols()),
        });
    }
    let drift = unitarity_report(phi).frobenius_drift;
    if drift > UNITARY_TOLERANCE {
        return Err(Error::NonUnitary { drift });
    }
    Ok(())
}

/// `Gamma - Phi Gamma^H Phi`: the ascent direction in the tangent space at `Phi`.
pub fn riemannian_gradient(phi: &CMatrix, gamma_euc: &CMatrix) -> Result<CMatrix> {
    check_pair(phi, gamma_euc)?;
    Ok(gamma_euc - phi * gamma_euc.adjoint() * phi)
}

/// `Gamma Phi^H - Phi Gamma^H`: the Riemannian gradient translated to the
/// identity, a skew-Hermitian generator for `Phi <- exp(mu S) Phi`.
pub fn geodesic_gradient(phi: &CMatrix, gamma_euc: &CMatrix) -> Result<CMatrix> {
    check_pair(phi, gamma_euc)?;
    Ok(geodesic_direction(phi, gamma_euc))
}

pub(crate) fn geodesic_direction(phi: &CMatrix, gamma_euc: &CMatrix) -> CMatrix {
    let m = gamma_euc * phi.adjoint();
    &m - m.adjoint()
}

/// `1/2 Re tr(X Y^H)`.
pub fn riemannian_metric(x: &CMatrix, y: &CMatrix) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", x.nrows(), x.ncols()),
            got: format!("{}x{}", y.nrows(), y.ncols()),
        });
    }
    Ok(0.5 * x.iter().zip(y.iter()).map(|(a, b)| (a * b.conj()).re).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_gaussian_matrix, seeded_rng, skew_residual};
    use crate::scene::{random_phi, random_scene};

    #[test]
    fn zero_at_unidentifiable_angle() {
        let mut rng = seeded_rng(1);
        let mut s = random_scene(4, 4, &mut rng);
        s.theta = -std::f64::consts::FRAC_PI_2;
        let g = euclidean_gradient(&random_phi(4, &mut rng), &s).unwrap();
        assert!(g.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn gain_scaling() {
        let mut rng = seeded_rng(2);
        let s = random_scene(3, 4, &mut rng);
        let phi = random_phi(4, &mut rng);
        let c = C64::new(0.3, -1.7);
        let g1 = euclidean_gradient(&phi, &s).unwrap();
        let g2 = euclidean_gradient(&phi, &s.with_alpha(s.alpha * c)).unwrap();
        assert!((g2 - &g1 * C64::new(c.norm_sqr(), 0.0)).norm() <= 1e-12 * g1.norm());
    }

    #[test]
    fn workspace_fields() {
        let mut rng = seeded_rng(3);
        let s = random_scene(4, 4, &mut rng);
        let phi = random_phi(4, &mut rng);
        let ch = s.static_channel().unwrap();
        let ws = GradientWorkspace::compute(&ch, phi.matrix()).unwrap();
        assert!(ws.b_tr > 0.0);
        // Omega is Hermitian by construction
        assert!((&ws.omega - ws.omega.adjoint()).norm() < 1e-12 * ws.omega.norm());
        assert!(ws.euclidean.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }

    #[test]
    fn tangent_and_geodesic_identities() {
        let mut rng = seeded_rng(4);
        let phi = random_phi(5, &mut rng);
        let p = phi.matrix();
        let gamma = random_gaussian_matrix(5, 5, &mut rng);
        let z = riemannian_gradient(p, &gamma).unwrap();
        let tangency = (p.adjoint() * &z + z.adjoint() * p).norm();
        assert!(tangency <= 1e-10 * (1.0 + z.norm()));
        let s = geodesic_gradient(p, &gamma).unwrap();
        assert!(skew_residual(&s) <= 1e-10 * (1.0 + s.norm()));
        assert!((&z * p.adjoint() - &s).norm() <= 1e-12 * (1.0 + s.norm()));

        let zero = CMatrix::zeros(5, 5);
        assert_eq!(riemannian_gradient(p, &zero).unwrap().norm(), 0.0);
        assert_eq!(geodesic_gradient(p, &zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn hermitian_part_annihilated_at_identity() {
        let mut rng = seeded_rng(5);
        let a = random_gaussian_matrix(4, 4, &mut rng);
        let herm = &a + a.adjoint();
        let id = CMatrix::identity(4, 4);
        assert!(riemannian_gradient(&id, &herm).unwrap().norm() < 1e-14);
    }

    #[test]
    fn rejects_non_unitary_point() {
        let phi = CMatrix::identity(3, 3) * C64::new(1.1, 0.0);
        let gamma = CMatrix::identity(3, 3);
        assert!(matches!(
            riemannian_gradient(&phi, &gamma),
            Err(Error::NonUnitary { .. })
        ));
        assert!(geodesic_gradient(&phi, &gamma).is_err());
    }

    #[test]
    fn metric_examples() {
        let id = CMatrix::identity(6, 6);
        assert_eq!(riemannian_metric(&id, &id).unwrap(), 3.0);
        let mut rng = seeded_rng(6);
        let x = random_gaussian_matrix(3, 3, &mut rng);
        let y = random_gaussian_matrix(3, 3, &mut rng);
        let xy = riemannian_metric(&x, &y).unwrap();
        let yx = riemannian_metric(&y, &x).unwrap();
        assert!((xy - yx).abs() < 1e-15);
        let jx = &x * C64::i();
        assert!(riemannian_metric(&jx, &x).unwrap().abs() < 1e-15);
        assert!((riemannian_metric(&x, &x).unwrap() - 0.5 * x.norm_squared()).abs() < 1e-13);
        assert!(riemannian_metric(&x, &CMatrix::zeros(2, 3)).is_err());
    }
}
