//! Relational models for discrete data.
//!
//! A relational model constrains the cell parameters `δ` of a discrete
//! sample space through `log δ = A'θ`, where the rows of the 0/1 design
//! matrix `A` indicate arbitrary subsets of cells. This crate provides
//!
//! * exact model construction: rank, integer kernel basis `D`, overall effect ([`model`]);
//! * maximum likelihood under Poisson and multinomial sampling, including the
//!   augmented estimate used when the MLE does not exist ([`mle`]);
//! * Pearson, likelihood ratio and Bregman statistics with chi-squared
//!   p-values ([`gof`], [`special`]);
//! * asymptotic covariance matrices of the estimates ([`asymptotics`]);
//! * Monte Carlo experiments comparing the statistics with their reference
//!   law ([`simulate`]).
//!
//! ```
//! use relmod::{build_model, fit_poisson, ObservedTable, SolverOptions};
//!
//! let cells: Vec<String> = ["fish", "sugarcane", "both"].iter().map(|s| s.to_string()).collect();
//! let model = build_model(&cells, &[vec![0, 2], vec![1, 2]]).unwrap();
//! let fit = fit_poisson(&model, &ObservedTable::new(vec![11, 2, 36]), &SolverOptions::default()).unwrap();
//! assert!((fit.estimate[2] - 35.06).abs() < 0.01);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
mod exact;
pub mod gof;
pub mod io;
mod linalg;
pub mod mle;
pub mod model;
pub mod simulate;
pub mod special;

pub use asymptotics::{
    multinomial_cov, overall_effect_cov, pearson_residuals, poisson_cov, poisson_weighted_projection,
    AsymptoticSummary, CovOptions,
};
pub use error::{Error, Result};
pub use gof::{bregman_stat, gof_test, lr_stat, pearson_stat, GofReport, LrReference, Statistic};
pub use mle::{fit_augmented, fit_multinomial, fit_poisson, mle_exists, FitResult, ObservedTable, SolverOptions};
pub use model::{
    build_model, has_overall_effect, rank_and_kernel, EffectSpec, ModelSpec, RelationalModel, SamplingScheme,
};
pub use simulate::{ks_distance, run_experiment, ExperimentConfig, SimulationReport};
pub use special::{chisq_cdf, chisq_sf};
