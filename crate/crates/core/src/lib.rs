//! Stochastic block multigraph models.
//!
//! The crate samples multigraphs whose edge counts depend on latent vertex
//! classes, counts copies of small patterns in them, computes the parameters of
//! the compound Poisson law approximating the copy count, and evaluates explicit
//! total-variation bounds for that approximation. Exact enumeration and Monte
//! Carlo routines check the bounds on concrete models.

pub mod bounds;
pub mod counting;
pub mod cp;
pub mod edge_dist;
pub mod error;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod model;
pub mod pattern;
pub mod seed;

pub use bounds::{tv_bound, BoundOptions, BoundReport, BoundVariant, RegimeConstants};
pub use counting::{count_copies, count_copies_bruteforce, Counter};
pub use cp::{
    c_lambda_upper, cp_pmf, expected_count, lambda_params, lambda_params_exact, occurrence_mean,
    poisson_stein_factor, poisson_tail_q2, CompoundPoissonParams,
};
pub use edge_dist::EdgeCountDistribution;
pub use error::{Error, Result};
pub use experiment::{exact_count_pmf, monte_carlo_pmf, run_experiment, tv_distance, ExperimentConfig, Mode};
pub use graph::ObservedMultigraph;
pub use model::{ModelExtrema, SbmmSpec};
pub use pattern::{BalancednessProfile, KappaVariant, PatternGraph};
