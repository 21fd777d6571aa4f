//! Dense complex-matrix kernels.
//!
//! Everything downstream works with `nalgebra` dynamic matrices over
//! [`Complex64`]. The kernels here cover the three things the unitary-group
//! machinery needs and `nalgebra` does not package directly:
//!
//! * exponentials of skew-Hermitian matrices through a cached spectral
//!   factorization ([`SkewSpectrum`]), so that `exp(mu * S)` can be rebuilt for
//!   many step sizes from one eigensolve;
//! * Haar-distributed random unitaries;
//! * re-unitarization (polar factor) and drift measurement.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance on `||S + S^H||_F` accepted as skew-Hermitian.
pub const SKEW_TOLERANCE: f64 = 1e-10;

/// Drift above which iterates are pulled back onto the unitary group.
pub const REUNITARIZE_THRESHOLD: f64 = 1e-10;

/// Smallest accepted `sigma_min / sigma_max` for [`reunitarize`].
pub const MIN_RCOND: f64 = 1e-12;

/// Deterministic RNG used everywhere a seed is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDimension);
    }
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

pub(crate) fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `||A - B||_F`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// `||A - B||_F / max(||B||_F, tiny)`.
pub fn relative_error(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius_distance(a, b) / b.norm().max(f64::MIN_POSITIVE)
}

/// `||S + S^H||_F`.
pub fn skew_residual(s: &CMatrix) -> f64 {
    (s + s.adjoint()).norm()
}

/// Rejects matrices outside the skew-Hermitian tolerance. Inputs are never
/// silently symmetrized: a non-skew direction means an upstream bug.
pub fn check_skew_hermitian(s: &CMatrix) -> Result<()> {
    ensure_square(s)?;
    ensure_finite(s)?;
    let residual = skew_residual(s);
    if residual > SKEW_TOLERANCE * (1.0 + s.norm()) {
        return Err(Error::NotSkewHermitian { residual });
    }
    Ok(())
}

/// Spectral factorization `S = V diag(j*omega) V^H` of a skew-Hermitian matrix.
///
/// Obtained from the Hermitian eigenproblem of `jS`. Once built, `exp(mu*S)`
/// for any real `mu` costs one scaled product, and its action on a vector
/// costs two matrix-vector products.
#[derive(Debug, Clone)]
pub struct SkewSpectrum {
    vectors: CMatrix,
    omegas: Vec<f64>,
}

impl SkewSpectrum {
    pub fn new(s: &CMatrix) -> Result<Self> {
        check_skew_hermitian(s)?;
        let n = s.nrows();
        let js = s * C64::i();
        // exact Hermitian copy; the eigensolver only reads one triangle
        let herm = (&js + js.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(herm, f64::EPSILON, 1000 * n.max(8))
            .ok_or(Error::EigenFailure)?;
        if eig.eigenvalues.iter().any(|w| !w.is_finite()) {
            return Err(Error::EigenFailure);
        }
        // jS = V diag(w) V^H  =>  S = V diag(-j w) V^H
        let omegas = eig.eigenvalues.iter().map(|w| -w).collect();
        Ok(Self {
            vectors: eig.eigenvectors,
            omegas,
        })
    }

    pub fn dim(&self) -> usize {
        self.omegas.len()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Purely imaginary eigenvalues `j*omega_k`.
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.omegas.iter().map(|&w| C64::new(0.0, w)).collect()
    }

    /// Imaginary parts of the eigenvalues.
    pub fn frequencies(&self) -> &[f64] {
        &self.omegas
    }

    /// `V diag(lambda) V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        self.scaled_outer(|w| C64::new(0.0, w))
    }

    /// `exp(mu * S)`.
    pub fn exp(&self, mu: f64) -> CMatrix {
        self.scaled_outer(|w| C64::from_polar(1.0, mu * w))
    }

    /// Coordinates `V^H v` used by [`SkewSpectrum::apply_exp`].
    pub fn coordinates(&self, v: &CVector) -> CVector {
        self.vectors.ad_mul(v)
    }

    /// `exp(mu * S) v` given `coords = V^H v`.
    pub fn apply_exp(&self, mu: f64, coords: &CVector) -> CVector {
        let scaled = CVector::from_iterator(
            coords.len(),
            coords
                .iter()
                .zip(&self.omegas)
                .map(|(c, &w)| c * C64::from_polar(1.0, mu * w)),
        );
        &self.vectors * scaled
    }

    fn scaled_outer(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut left = self.vectors.clone();
        for (k, &w) in self.omegas.iter().enumerate() {
            let d = f(w);
            for z in left.column_mut(k).iter_mut() {
                *z *= d;
            }
        }
        left * self.vectors.adjoint()
    }
}

/// `exp(mu * S)` for skew-Hermitian `S`.
///
/// Uses the spectral route; if the Hermitian eigensolver fails the generic
/// scaling-and-squaring Padé exponential is used instead.
pub fn expm_skew(s: &CMatrix, mu: f64) -> Result<CMatrix> {
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("step {mu} is not finite")));
    }
    match SkewSpectrum::new(s) {
        Ok(spec) => Ok(spec.exp(mu)),
        Err(Error::EigenFailure) => expm_pade(&(s * C64::new(mu, 0.0))),
        Err(e) => Err(e),
    }
}

/// General matrix exponential (scaling and squaring with Padé approximants).
pub fn expm_pade(m: &CMatrix) -> Result<CMatrix> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let out = m.clone().exp();
    ensure_finite(&out)?;
    Ok(out)
}

/// Haar-distributed `n x n` unitary drawn from a fresh seeded stream.
pub fn haar_random_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = seeded_rng(seed);
    haar_random_unitary_with(n, &mut rng)
}

/// Haar unitary from QR of an i.i.d. `CN(0, 1)` matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_random_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let gauss = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(q)
}

/// Nearest unitary matrix in Frobenius norm (the polar factor `U V^H` of the
/// SVD `M = U Sigma V^H`).
pub fn reunitarize(m: &CMatrix) -> Result<CMatrix> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond < MIN_RCOND {
        return Err(Error::Singular { rcond });
    }
    let u = svd.u.ok_or(Error::EigenFailure)?;
    let v_t = svd.v_t.ok_or(Error::EigenFailure)?;
    Ok(u * v_t)
}

/// Distance of `M^H M` from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport {
    /// `||M^H M - I||_F`
    pub frobenius_drift: f64,
    /// `max_ij |(M^H M - I)_ij|`
    pub max_entry_drift: f64,
}

pub fn unitarity_report(m: &CMatrix) -> UnitarityReport {
    let n = m.ncols();
    let gram = m.ad_mul(m) - CMatrix::identity(n, n);
    UnitarityReport {
        frobenius_drift: gram.norm(),
        max_entry_drift: gram.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

/// Random skew-Hermitian matrix with i.i.d. Gaussian generators.
pub fn random_skew_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let a = random_gaussian_matrix(n, n, rng);
    (&a - a.adjoint()) * C64::new(0.5, 0.0)
}

/// `CN(0, 1)` i.i.d. entries.
pub fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eye(n: usize) -> CMatrix {
        CMatrix::identity(n, n)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for n in [1, 3, 7] {
            let u = expm_skew(&CMatrix::zeros(n, n), 1.0).unwrap();
            assert!(frobenius_distance(&u, &eye(n)) <= 1e-14);
        }
    }

    #[test]
    fn exp_of_j_pi_is_minus_one() {
        let s = CMatrix::from_element(1, 1, C64::new(0.0, PI));
        let u = expm_skew(&s, 1.0).unwrap();
        assert!((u[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_matches_pade_and_is_unitary() {
        let mut rng = seeded_rng(11);
        let s = random_skew_hermitian(8, &mut rng);
        let u = expm_skew(&s, 0.3).unwrap();
        let reference = expm_pade(&(&s * C64::new(0.3, 0.0))).unwrap();
        assert!(relative_error(&u, &reference) < 1e-12);
        assert!(unitarity_report(&u).frobenius_drift <= 1e-11 * 8.0);
        // eigenvalues of U on the unit circle: U is normal so |λ| = singular values
        let sv = u.clone().svd(false, false).singular_values;
        assert!(sv.iter().all(|s| (s - 1.0).abs() < 1e-10));
    }

    #[test]
    fn semigroup_doubling() {
        let mut rng = seeded_rng(5);
        let s = random_skew_hermitian(6, &mut rng);
        let spec = SkewSpectrum::new(&s).unwrap();
        let one = spec.exp(0.7);
        let two = spec.exp(1.4);
        assert!(relative_error(&(&one * &one), &two) < 1e-10);
    }

    #[test]
    fn spectrum_of_diagonal() {
        let s = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
        ]));
        let spec = SkewSpectrum::new(&s).unwrap();
        let mut im: Vec<f64> = spec.eigenvalues().iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-15 && (im[1] - 1.0).abs() < 1e-15);
        assert!(spec.eigenvalues().iter().all(|z| z.re == 0.0));
        // eigenvectors are unit coordinate vectors up to phase
        for col in spec.vectors().column_iter() {
            let big = col.iter().filter(|z| z.norm() > 1.0 - 1e-12).count();
            assert_eq!(big, 1);
        }
    }

    #[test]
    fn spectrum_of_zero() {
        let spec = SkewSpectrum::new(&CMatrix::zeros(4, 4)).unwrap();
        assert!(spec.eigenvalues().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn spectrum_reconstructs() {
        let mut rng = seeded_rng(3);
        let s = random_skew_hermitian(4, &mut rng);
        let spec = SkewSpectrum::new(&s).unwrap();
        assert!(relative_error(&spec.reconstruct(), &s) <= 1e-9);
        assert!(unitarity_report(spec.vectors()).frobenius_drift <= 1e-10);
        let v = CVector::from_fn(4, |k, _| C64::new(k as f64, 1.0));
        let via_coords = spec.apply_exp(0.4, &spec.coordinates(&v));
        let direct = spec.exp(0.4) * &v;
        assert!((via_coords - direct).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(expm_skew(&rect, 1.0), Err(Error::NotSquare { .. })));
        let herm = CMatrix::identity(3, 3);
        assert!(matches!(
            expm_skew(&herm, 1.0),
            Err(Error::NotSkewHermitian { .. })
        ));
        let mut nan = CMatrix::zeros(2, 2);
        nan[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(expm_skew(&nan, 1.0), Err(Error::NonFinite)));
        assert!(expm_skew(&CMatrix::zeros(2, 2), f64::INFINITY).is_err());
    }

    #[test]
    fn haar_basics() {
        let u = haar_random_unitary(1, 99).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        let a = haar_random_unitary(8, 7).unwrap();
        let b = haar_random_unitary(8, 7).unwrap();
        assert_eq!(a, b);
        assert!(unitarity_report(&a).frobenius_drift <= 1e-11);
        assert!(matches!(haar_random_unitary(0, 1), Err(Error::EmptyDimension)));
    }

    #[test]
    fn haar_second_moment() {
        let mut rng = seeded_rng(2024);
        let samples = 10_000;
        let mean: f64 = (0..samples)
            .map(|_| haar_random_unitary_with(4, &mut rng).unwrap()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / samples as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean |U11|^2 = {mean}");
    }

    #[test]
    fn reunitarize_cases() {
        let i3 = eye(3);
        assert!(frobenius_distance(&reunitarize(&i3).unwrap(), &i3) < 1e-14);
        let two = &i3 * C64::new(2.0, 0.0);
        assert!(frobenius_distance(&reunitarize(&two).unwrap(), &i3) < 1e-14);

        let mut rng = seeded_rng(8);
        let u = haar_random_unitary_with(5, &mut rng).unwrap();
        let e = random_gaussian_matrix(5, 5, &mut rng);
        let e = &e * C64::new(1e-8 / e.norm(), 0.0);
        let fixed = reunitarize(&(&u + &e)).unwrap();
        assert!(frobenius_distance(&fixed, &u) <= 2e-8);
        let again = reunitarize(&fixed).unwrap();
        assert!(frobenius_distance(&again, &fixed) <= 1e-11);
        assert!(frobenius_distance(&reunitarize(&u).unwrap(), &u) <= 1e-11);

        let singular = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        assert!(matches!(reunitarize(&singular), Err(Error::Singular { .. })));
    }

    #[test]
    fn report_values() {
        let r = unitarity_report(&eye(4));
        assert_eq!(r.frobenius_drift, 0.0);
        let r = unitarity_report(&(eye(2) * C64::new(2.0, 0.0)));
        assert!((r.frobenius_drift - 3.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((r.max_entry_drift - 3.0).abs() < 1e-14);
        let h = haar_random_unitary(8, 12).unwrap();
        assert!(unitarity_report(&h).frobenius_drift <= 1e-11);
    }
}
