//! Empirical distribution summaries: KS distance, quantiles, histograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::chisq_cdf_total;

/// Kolmogorov–Smirnov distance `sup |F_n(x) - F(x)|` between the empirical
/// CDF of `sample` and the chi-squared CDF with `df` degrees of freedom.
pub fn ks_distance(sample: &[f64], df: usize) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if df == 0 {
        return Err(Error::InvalidArgument("KS distance needs df >= 1".into()));
    }
    if let Some(x) = sample.iter().find(|x| x.is_nan()) {
        return Err(Error::InvalidArgument(format!("sample value {x} is not a number")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        // ties: the ECDF jumps once over the whole run
        let x = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == x {
            j += 1;
        }
        let f = chisq_cdf_total(x, df);
        let before = i as f64 / n;
        let after = (j + 1) as f64 / n;
        d = d.max((f - before).abs()).max((after - f).abs());
        i = j + 1;
    }
    Ok(d.min(1.0))
}

/// Linear-interpolation quantile (type 7) of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Histogram with equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Bin edges, one more than the number of bins.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

const MAX_BINS: usize = 1000;

/// Histogram with the Freedman–Diaconis bin width `2 IQR n^{-1/3}`.
pub fn freedman_diaconis(sample: &[f64]) -> Histogram {
    let mut sorted: Vec<f64> = sample.iter().copied().filter(|x| x.is_finite()).collect();
    if sorted.is_empty() {
        return Histogram {
            edges: Vec::new(),
            counts: Vec::new(),
        };
    }
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let bins = if hi > lo && width > 0.0 {
        (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
    } else {
        1
    };
    let step = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * step).collect();
    let mut counts = vec![0u64; bins];
    for &x in &sorted {
        let k = (((x - lo) / step) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Histogram { edges, counts }
}
