//! Cramér-Rao bound evaluation and minimization for angle-of-arrival sensing
//! through a beyond-diagonal reconfigurable intelligent surface.
//!
//! A single-antenna target transmits pilots that reach a multi-antenna base
//! station only through the surface. The base station estimates the angle of
//! arrival `theta` at the surface; the surface's unitary scattering matrix
//! `Phi` shapes how much information about `theta` survives. This crate
//!
//! * models the cascaded channel ([`scene`]),
//! * computes the Fisher information and the CRB on `theta` ([`fisher`]),
//! * maximizes the CRB's denominator over the unitary group by adaptive
//!   Riemannian steepest ascent ([`optim`]), including block-diagonal
//!   (group-connected) and diagonal surfaces,
//! * and ships the checks that keep all of it honest: finite-difference
//!   gradients, a maximum-likelihood estimator and Monte Carlo MSE
//!   ([`estimate`], [`fd`]).
//!
//! The [`experiment`] module drives parameter sweeps and the `bdris-crb`
//! command-line tool.

pub mod error;
pub mod estimate;
pub mod experiment;
pub mod fd;
pub mod fisher;
pub mod linalg;
pub mod optim;
pub mod scene;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use fisher::{crb_theta, fim_blocks, objective_g, FisherBlocks};
pub use linalg::{CMatrix, CVector, C64};
pub use optim::{Architecture, OptimizerConfig, OptimizerTrace, ScatteringMatrix};
pub use scene::{build_channel, ChannelBundle, Scenario};
