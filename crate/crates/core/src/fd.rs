//! Central finite-difference Wirtinger gradients.
//!
//! For a real function `f` of a complex matrix, the oracle returns
//! `(df/dRe Phi_mn + j df/dIm Phi_mn) / 2`, i.e. `df/dPhi*_mn`. Perturbations
//! stay in the ambient space `C^{n x n}`; nothing is projected back onto the
//! unitary group.

use crate::error::{Error, Result};
use crate::fisher::objective_g;
use crate::linalg::{CMatrix, C64};
use crate::scene::{build_channel_unconstrained, Scenario};

pub const MIN_STEP: f64 = 1e-8;
pub const MAX_STEP: f64 = 1e-4;

/// Wirtinger gradient of an arbitrary real function by central differences.
pub fn fd_wirtinger<F>(f: F, phi: &CMatrix, step: f64) -> Result<CMatrix>
where
    F: Fn(&CMatrix) -> Result<f64>,
{
    if !(MIN_STEP..=MAX_STEP).contains(&step) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {step:e} outside [{MIN_STEP:e}, {MAX_STEP:e}]"
        )));
    }
    let (rows, cols) = phi.shape();
    let mut grad = CMatrix::zeros(rows, cols);
    let mut probe = phi.clone();
    for i in 0..rows {
        for j in 0..cols {
            let orig = probe[(i, j)];
            let mut partial = [0.0; 2];
            for (k, dir) in [C64::new(step, 0.0), C64::new(0.0, step)].into_iter().enumerate() {
                probe[(i, j)] = orig + dir;
                let plus = f(&probe)?;
                probe[(i, j)] = orig - dir;
                let minus = f(&probe)?;
                partial[k] = (plus - minus) / (2.0 * step);
            }
            probe[(i, j)] = orig;
            grad[(i, j)] = C64::new(0.5 * partial[0], 0.5 * partial[1]);
        }
    }
    Ok(grad)
}

/// Finite-difference `dg/dPhi*` of the CRB objective.
pub fn fd_gradient_oracle(phi: &CMatrix, scene: &Scenario, step: f64) -> Result<CMatrix> {
    let channel = scene.static_channel()?;
    fd_wirtinger(
        |p| objective_g(&channel.bundle(p)?),
        phi,
        step,
    )
}

/// Same as [`fd_gradient_oracle`], rebuilding the channel from scratch at every
/// probe. Slower; kept as a fully independent route.
pub fn fd_gradient_oracle_cold(phi: &CMatrix, scene: &Scenario, step: f64) -> Result<CMatrix> {
    fd_wirtinger(
        |p| objective_g(&build_channel_unconstrained(scene, p)?),
        phi,
        step,
    )
}
