//! Total-variation regularized Fréchet regression for time-indexed data in
//! geodesic metric spaces.
//!
//! The estimator minimizes n⁻¹ Σ d²(g(t_i), Y_i) + λ · TV(g) over step
//! functions g: [0,1] → M, where M is any backend implementing the
//! [`metric::Space`] contract. Shipped backends: Euclidean ℝᵏ, symmetric
//! positive-definite matrices (affine-invariant or Log-Euclidean metric)
//! and the 2-Wasserstein space of distributions on ℝ represented by
//! quantile functions. The solver is a cyclic proximal point algorithm; λ
//! can be chosen by K-fold cross-validation or by a target jump count, and
//! a simulation harness reproduces seeded Monte-Carlo experiments.

pub mod error;
pub mod euclidean;
pub mod io;
pub mod metric;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod spd;
pub mod wasserstein;

pub use error::{Error, Result};
pub use euclidean::{Euclidean, VecPoint};
pub use metric::{
    common_shape, d_n, inductive_frechet_mean, total_variation, MeanError, MeanOptions, Shape,
    Space, StepFunction, TimeSeries,
};
pub use solver::{
    cross_validate, extract_jumps, fit, fit_extrapolated, median_adjacent_distance, objective,
    prox_data,
    prox_tv_pair, select_lambda_by_jumps, CvResult, FitResult, JumpSelection, SolverConfig,
};
pub use spd::{SpdMetric, SpdPoint, SpdSpace, SymMat};
pub use wasserstein::{QuantilePoint, WassersteinSpace};
