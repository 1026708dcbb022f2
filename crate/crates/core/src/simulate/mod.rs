//! Monte Carlo experiments: sample tables from a truth in the model, fit,
//! and compare the distribution of the test statistics with `χ²_K`.

mod empirical;
mod sampling;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use empirical::{freedman_diaconis, ks_distance, quantile_sorted, Histogram};
pub use sampling::{replicate_rng, sample_multinomial, sample_poisson, NORMALIZATION_TOL};

use crate::error::{Error, Result};
use crate::gof::{all_statistics, Statistic};
use crate::mle::{fit_augmented, ObservedTable, SolverOptions};
use crate::model::{RelationalModel, SamplingScheme};
use crate::special::chisq_quantile;

/// Largest accepted `max |D log truth|`.
pub const TRUTH_IN_MODEL_TOL: f64 = 1e-8;

/// Quantile levels reported per statistic.
pub const QUANTILE_LEVELS: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: SamplingScheme,
    /// Intensities (Poisson) or probabilities summing to one (multinomial).
    pub truth: Vec<f64>,
    /// Multinomial sample size `N`.
    pub sample_size: Option<u64>,
    pub replicates: usize,
    pub seed: u64,
    pub statistics: Vec<Statistic>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Worker threads; `None` uses the global rayon pool. Results do not
    /// depend on this.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(scheme: SamplingScheme, truth: Vec<f64>, replicates: usize, seed: u64) -> Self {
        ExperimentConfig {
            scheme,
            truth,
            sample_size: None,
            replicates,
            seed,
            statistics: Statistic::ALL.to_vec(),
            solver: SolverOptions::default(),
            threads: None,
        }
    }

    pub fn with_sample_size(mut self, n: u64) -> Self {
        self.sample_size = Some(n);
        self
    }

    pub fn validate(&self, model: &RelationalModel) -> Result<()> {
        if self.truth.len() != model.num_cells() {
            return Err(Error::DimensionMismatch {
                expected: model.num_cells(),
                got: self.truth.len(),
            });
        }
        if let Some((cell, &value)) = self
            .truth
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::NonPositiveParameter { cell, value });
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be positive".into()));
        }
        if self.scheme == SamplingScheme::Multinomial {
            match self.sample_size {
                Some(n) if n > 0 => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "multinomial experiments need a positive sample size".into(),
                    ))
                }
            }
            let sum: f64 = self.truth.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotNormalized { sum });
            }
        }
        let residual = model.model_residual(&self.truth);
        if residual > TRUTH_IN_MODEL_TOL {
            return Err(Error::NotInModel { residual });
        }
        Ok(())
    }
}

/// Everything recorded about one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub pearson: f64,
    pub lr: f64,
    pub bregman: f64,
    pub existed: bool,
    pub fitted_total: f64,
    pub observed_total: f64,
}

impl ReplicateRecord {
    pub fn value(&self, stat: Statistic) -> f64 {
        match stat {
            Statistic::Pearson => self.pearson,
            Statistic::Lr => self.lr,
            Statistic::Bregman => self.bregman,
        }
    }

    pub fn total_preserved(&self) -> bool {
        (self.fitted_total - self.observed_total).abs() <= 1e-8 * (1.0 + self.observed_total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub level: f64,
    pub empirical: f64,
    /// The same quantile of `χ²_df`, absent when `df = 0`.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticSummary {
    pub statistic: Statistic,
    pub mean: f64,
    pub variance: f64,
    /// Distance to `χ²_df`; absent when `df = 0`.
    pub ks_distance: Option<f64>,
    pub quantiles: Vec<QuantilePoint>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scheme: SamplingScheme,
    pub truth: Vec<f64>,
    pub sample_size: Option<u64>,
    pub seed: u64,
    pub df: usize,
    pub replicates: usize,
    /// Replicates in which the MLE did not exist and the augmented estimate was used.
    pub existence_failures: usize,
    /// Indices of replicates whose fit did not converge; they are excluded from the summaries.
    pub fit_failures: Vec<usize>,
    pub negative_lr_fraction: f64,
    /// Fraction of replicates whose fitted total differs from the observed total.
    pub total_not_preserved_fraction: f64,
    pub summaries: Vec<StatisticSummary>,
    /// Per-replicate values; written separately as CSV.
    #[serde(skip)]
    pub records: Vec<ReplicateRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SimulationReport {
    /// Values of `stat` over the successful replicates, in replicate order.
    pub fn sample(&self, stat: Statistic) -> Vec<f64> {
        self.records.iter().map(|r| r.value(stat)).collect()
    }

    pub fn summary(&self, stat: Statistic) -> Option<&StatisticSummary> {
        self.summaries.iter().find(|s| s.statistic == stat)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("simulation report: {e}")))
    }
}

fn run_replicate(model: &RelationalModel, config: &ExperimentConfig, index: usize) -> Result<ReplicateRecord> {
    let mut rng = replicate_rng(config.seed, index as u64);
    let counts = match config.scheme {
        SamplingScheme::Poisson => sample_poisson(&config.truth, &mut rng)?,
        SamplingScheme::Multinomial => sample_multinomial(config.sample_size.unwrap_or(0), &config.truth, &mut rng)?,
    };
    let y = ObservedTable::new(counts);
    let fit = fit_augmented(model, &y, config.scheme, &config.solver)?;
    let observed = y.as_f64();
    let fitted = fit.fitted_counts(y.total());
    let (pearson, lr, bregman) = all_statistics(&observed, &fitted)?;
    Ok(ReplicateRecord {
        replicate: index,
        pearson,
        lr,
        bregman,
        existed: fit.existed,
        fitted_total: fitted.iter().sum(),
        observed_total: observed.iter().sum(),
    })
}

fn summarize(stat: Statistic, values: &[f64], df: usize) -> Result<StatisticSummary> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&level| QuantilePoint {
            level,
            empirical: quantile_sorted(&sorted, level),
            reference: (df > 0).then(|| chisq_quantile(level, df)),
        })
        .collect();
    Ok(StatisticSummary {
        statistic: stat,
        mean,
        variance,
        ks_distance: if df > 0 { Some(ks_distance(values, df)?) } else { None },
        quantiles,
        histogram: freedman_diaconis(values),
    })
}

/// Runs `config.replicates` independent replicates and summarizes them.
///
/// Output is a deterministic function of the config: every replicate draws
/// from its own stream and results are aggregated in replicate order.
/// Replicates whose fit does not converge are recorded; more than 1% of
/// them aborts the run.
pub fn run_experiment(model: &RelationalModel, config: &ExperimentConfig) -> Result<SimulationReport> {
    config.validate(model)?;
    let start = Instant::now();
    let run = || -> Vec<Result<ReplicateRecord>> {
        (0..config.replicates)
            .into_par_iter()
            .map(|i| run_replicate(model, config, i))
            .collect()
    };
    let outcomes = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut records = Vec::with_capacity(config.replicates);
    let mut fit_failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(Error::NonConvergence { .. }) => {
                log::warn!("replicate {i} did not converge");
                fit_failures.push(i);
            }
            Err(e) => return Err(e),
        }
    }
    if fit_failures.len() * 100 > config.replicates {
        return Err(Error::TooManyFailures {
            failed: fit_failures.len(),
            replicates: config.replicates,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptySample);
    }

    let df = model.df();
    let count = records.len() as f64;
    let mut summaries = Vec::new();
    let mut wanted = config.statistics.clone();
    wanted.sort();
    wanted.dedup();
    for stat in wanted {
        let values: Vec<f64> = records.iter().map(|r| r.value(stat)).collect();
        summaries.push(summarize(stat, &values, df)?);
    }
    Ok(SimulationReport {
        scheme: config.scheme,
        truth: config.truth.clone(),
        sample_size: config.sample_size,
        seed: config.seed,
        df,
        replicates: config.replicates,
        existence_failures: records.iter().filter(|r| !r.existed).count(),
        fit_failures,
        negative_lr_fraction: records.iter().filter(|r| r.lr < 0.0).count() as f64 / count,
        total_not_preserved_fraction: records.iter().filter(|r| !r.total_preserved()).count() as f64 / count,
        summaries,
        records,
        elapsed: start.elapsed(),
    })
}
