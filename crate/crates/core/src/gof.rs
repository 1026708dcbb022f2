//! Pearson, likelihood ratio and Bregman goodness-of-fit statistics.
//!
//! For observed `u ≥ 0` and fitted `v > 0`:
//!
//! * Pearson `X² = Σ (u - v)² / v`
//! * likelihood ratio `G² = 2 Σ u log(u/v)`
//! * Bregman `B = 2 Σ {u log(u/v) - (u - v)}`
//!
//! with `0 log 0 = 0`. Hence `B = G² + 2(1'v - 1'u)`; `G²` can be negative
//! when the fitted total exceeds the observed one, `B` cannot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mle::{fit_augmented, ObservedTable, SolverOptions};
use crate::model::{RelationalModel, SamplingScheme};
use crate::special::chisq_sf;

/// Statistic values below this are treated as zero when `df = 0`.
const ZERO_STATISTIC: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Pearson,
    Lr,
    Bregman,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Pearson, Statistic::Lr, Statistic::Bregman];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Pearson => "pearson",
            Statistic::Lr => "lr",
            Statistic::Bregman => "bregman",
        }
    }

    pub fn compute(self, observed: &[f64], fitted: &[f64]) -> Result<f64> {
        match self {
            Statistic::Pearson => pearson_stat(observed, fitted),
            Statistic::Lr => lr_stat(observed, fitted),
            Statistic::Bregman => bregman_stat(observed, fitted),
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" | "x2" => Ok(Statistic::Pearson),
            "lr" | "g2" => Ok(Statistic::Lr),
            "bregman" | "b" => Ok(Statistic::Bregman),
            other => Err(Error::Parse(format!("unknown statistic `{other}`"))),
        }
    }
}

fn check(observed: &[f64], fitted: &[f64]) -> Result<()> {
    if observed.len() != fitted.len() {
        return Err(Error::DimensionMismatch {
            expected: fitted.len(),
            got: observed.len(),
        });
    }
    if let Some((cell, &value)) = fitted.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveFitted { cell, value });
    }
    if let Some(&u) = observed.iter().find(|u| !(**u >= 0.0)) {
        return Err(Error::InvalidArgument(format!("observed value {u} is negative")));
    }
    Ok(())
}

// u log(u/v) with 0 log 0 = 0.
fn xlogy(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * (u / v).ln()
    }
}

pub fn pearson_stat(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    check(observed, fitted)?;
    Ok(observed.iter().zip(fitted).map(|(u, v)| (u - v) * (u - v) / v).sum())
}

pub fn lr_stat(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    check(observed, fitted)?;
    Ok(2.0 * observed.iter().zip(fitted).map(|(&u, &v)| xlogy(u, v)).sum::<f64>())
}

pub fn bregman_stat(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    check(observed, fitted)?;
    let s: f64 = observed.iter().zip(fitted).map(|(&u, &v)| xlogy(u, v) - (u - v)).sum();
    // each term is >= 0 mathematically; clamp rounding
    Ok((2.0 * s).max(0.0))
}

/// Which reference law the LR p-value may be read against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrReference {
    ChiSquared,
    /// Poisson sampling without the overall effect: the LR statistic is not
    /// asymptotically chi-squared, the p-value is informational only.
    Unsupported,
}

/// Result of a goodness-of-fit test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub scheme: SamplingScheme,
    pub pearson: f64,
    pub lr: f64,
    pub bregman: f64,
    pub df: usize,
    pub p_pearson: f64,
    pub p_lr: f64,
    pub p_bregman: f64,
    pub lr_reference: LrReference,
    pub observed_total: f64,
    pub fitted_total: f64,
    /// False when the statistics were computed against the augmented estimate.
    pub existed: bool,
    pub fitted: Vec<f64>,
}

impl GofReport {
    pub fn value(&self, stat: Statistic) -> f64 {
        match stat {
            Statistic::Pearson => self.pearson,
            Statistic::Lr => self.lr,
            Statistic::Bregman => self.bregman,
        }
    }

    pub fn p_value(&self, stat: Statistic) -> f64 {
        match stat {
            Statistic::Pearson => self.p_pearson,
            Statistic::Lr => self.p_lr,
            Statistic::Bregman => self.p_bregman,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("gof report: {e}")))
    }
}

/// Upper-tail p-value with the conventions used in reports: a value `<= 0`
/// has p = 1, and with zero degrees of freedom p is 1 for a zero statistic
/// and 0 otherwise.
pub fn p_value(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return if stat.abs() <= ZERO_STATISTIC { 1.0 } else { 0.0 };
    }
    if stat <= 0.0 {
        return 1.0;
    }
    chisq_sf(stat, df).unwrap_or(f64::NAN)
}

/// Statistics of `observed` against `fitted` with all-zero augmented tables
/// mapped to zero.
pub(crate) fn all_statistics(observed: &[f64], fitted: &[f64]) -> Result<(f64, f64, f64)> {
    if fitted.iter().all(|&v| v == 0.0) && observed.iter().all(|&u| u == 0.0) {
        return Ok((0.0, 0.0, 0.0));
    }
    Ok((
        pearson_stat(observed, fitted)?,
        lr_stat(observed, fitted)?,
        bregman_stat(observed, fitted)?,
    ))
}

/// Fits the model (falling back to the augmented estimate) and tests it.
pub fn gof_test(
    model: &RelationalModel,
    y: &ObservedTable,
    scheme: SamplingScheme,
    opts: &SolverOptions,
) -> Result<GofReport> {
    let fit = fit_augmented(model, y, scheme, opts)?;
    let observed = y.as_f64();
    let fitted = fit.fitted_counts(y.total());
    let (pearson, lr, bregman) = all_statistics(&observed, &fitted)?;
    let df = model.df();
    let lr_reference = if scheme == SamplingScheme::Poisson && !model.overall_effect() {
        LrReference::Unsupported
    } else {
        LrReference::ChiSquared
    };
    Ok(GofReport {
        scheme,
        pearson,
        lr,
        bregman,
        df,
        p_pearson: p_value(pearson, df),
        p_lr: p_value(lr, df),
        p_bregman: p_value(bregman, df),
        lr_reference,
        observed_total: observed.iter().sum(),
        fitted_total: fitted.iter().sum(),
        existed: fit.existed,
        fitted,
    })
}
