//! Closed-form maximum of the objective over the full unitary group.
//!
//! With `v1 = Phi a` and `v2 = Phi a_dot`, unitarity fixes only the Gram matrix
//! of `(v1, v2)`. Splitting `v2 = c v1 + w` with `w` orthogonal to `v1`,
//!
//! ```text
//! g = |alpha|^2 || P_perp(G v1) G w ||^2,    ||w||^2 = ||a_dot||^2 - |a^H a_dot|^2 / ||a||^2
//! ```
//!
//! which is at most `|alpha|^2 s1^2 ||w||^2` with `s1` the largest singular value
//! of `G`. The bound is attained by sending `w` to the top right-singular vector
//! and `v1` to the second one, so it is the maximum whenever `rank G >= 2`. Any
//! block-diagonal architecture is a subset and stays below it.

use crate::error::Result;
use crate::scene::Scenario;

/// `|alpha|^2 s1(G)^2 (||a_dot||^2 - |a^H a_dot|^2 / N_R)`.
pub fn unitary_upper_bound(scene: &Scenario) -> Result<f64> {
    let ch = scene.static_channel()?;
    let s1 = ch
        .g_mat
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let a = &ch.a_ris_theta;
    let a_dot = &ch.a_ris_dot;
    let w2 = (a_dot.norm_squared() - a_dot.dotc(a).norm_sqr() / a.norm_squared()).max(0.0);
    Ok(ch.alpha.norm_sqr() * s1 * s1 * w2)
}
