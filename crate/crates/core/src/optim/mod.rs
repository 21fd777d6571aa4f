//! Optimization of the scattering matrix over the unitary group.

pub mod ascent;
pub mod bound;
pub mod gradient;
pub mod scattering;

pub use ascent::{
    ascent, ascent_grouped, ascent_multistart, ascent_multistart_from, objective_at, random_objective,
    random_unitary_objective, restart_seed, IterationRecord, OptimizerConfig, OptimizerTrace,
    RandomBaseline, Status,
};
pub use bound::unitary_upper_bound;
pub use gradient::{
    euclidean_gradient, euclidean_gradient_unconstrained, geodesic_gradient, riemannian_gradient,
    riemannian_metric, GradientWorkspace,
};
pub use scattering::{Architecture, ScatteringMatrix};
