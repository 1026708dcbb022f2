//! Asymptotic covariance matrices of the MLE and Pearson residuals.
//!
//! Poisson: `Δ[λ^{-1/2}](λ̂ - λ)` is asymptotically normal with covariance
//! `I - D'(DD')⁻¹D`, the orthogonal projection onto `Ker(D)`.
//!
//! Multinomial: `√N(p̂ - p)` is asymptotically normal with covariance `MΣM'`
//! where `Σ = Δ[p] - pp'`, `H = (1, Δ[p⁻¹]D')` and
//! `M = I - Δ[p]H(H'Δ[p]H)⁻¹H'`. With the overall effect this equals
//! `Σ - D'(DΔ[p⁻¹]D')⁻¹D`.
//!
//! Reported standard errors are plug-in values: the limits hold at the true
//! parameter, we evaluate them at the estimate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse_spd, matrix_rows, symmetric_rank, symmetrize};
use crate::model::RelationalModel;

/// Tolerances for the preconditions of the multinomial formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovOptions {
    /// Largest accepted `max |D log p|`.
    pub in_model_tol: f64,
    /// Largest accepted `|1'p - 1|`.
    pub normalization_tol: f64,
}

impl Default for CovOptions {
    fn default() -> Self {
        CovOptions {
            in_model_tol: 1e-8,
            normalization_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSummary {
    /// Covariance of the scaled estimator.
    #[serde(with = "matrix_rows")]
    pub scaled_cov: DMatrix<f64>,
    /// Plug-in covariance of the unscaled estimate; for multinomial fits only
    /// available once a sample size is supplied.
    #[serde(with = "opt_matrix_rows")]
    pub estimate_cov: Option<DMatrix<f64>>,
    pub std_errors: Option<Vec<f64>>,
    pub residuals: Option<Vec<f64>>,
    pub rank: usize,
}

impl AsymptoticSummary {
    /// Unscales a multinomial summary: `Cov(p̂) ≈ MΣM'/N`.
    pub fn with_sample_size(mut self, n: u64) -> Self {
        let cov = &self.scaled_cov / n as f64;
        self.std_errors = Some(diag_sqrt(&cov));
        self.estimate_cov = Some(cov);
        self
    }

    pub fn with_residuals(mut self, residuals: Vec<f64>) -> Self {
        self.residuals = Some(residuals);
        self
    }
}

mod opt_matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<DMatrix<f64>>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref()
            .map(|m| {
                m.row_iter()
                    .map(|r| r.iter().copied().collect::<Vec<f64>>())
                    .collect::<Vec<_>>()
            })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DMatrix<f64>>, D::Error> {
        let rows: Option<Vec<Vec<f64>>> = Option::deserialize(d)?;
        rows.map(|rows| {
            let ncols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(serde::de::Error::custom("ragged matrix"));
            }
            Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
        })
        .transpose()
    }
}

fn diag_sqrt(m: &DMatrix<f64>) -> Vec<f64> {
    m.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
}

fn check_positive(model: &RelationalModel, v: &[f64]) -> Result<()> {
    if v.len() != model.num_cells() {
        return Err(Error::DimensionMismatch {
            expected: model.num_cells(),
            got: v.len(),
        });
    }
    match v.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        Some((cell, &value)) => Err(Error::NonPositiveParameter { cell, value }),
        None => Ok(()),
    }
}

fn check_probabilities(model: &RelationalModel, p: &[f64], opts: &CovOptions) -> Result<()> {
    check_positive(model, p)?;
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > opts.normalization_tol {
        return Err(Error::NotNormalized { sum });
    }
    let residual = model.model_residual(p);
    if residual > opts.in_model_tol {
        return Err(Error::NotInModel { residual });
    }
    Ok(())
}

/// `I - D'(DD')⁻¹D`.
pub fn poisson_projection(model: &RelationalModel) -> DMatrix<f64> {
    let n = model.num_cells();
    let mut proj = DMatrix::identity(n, n);
    if model.df() > 0 {
        let d = model.kernel_matrix();
        let gram_inv = inverse_spd(&(&d * d.transpose()), "DD'").expect("kernel basis has full rank");
        proj -= d.transpose() * gram_inv * &d;
    }
    symmetrize(&mut proj);
    proj
}

/// `I - G(G'G)⁻¹G'` with `G = Δ[λ^{-1/2}]D'`: the delta-method covariance of
/// `Δ[λ^{-1/2}](λ̂ - λ)` at finite `λ`.
///
/// It is invariant under `λ → cλ`, so it is also the large-intensity limit
/// along any ray. It agrees with [`poisson_projection`] when `Δ[λ^{-1/2}]D'`
/// and `D'` span the same space, for example when `λ` is constant; for
/// unequal intensities the two differ.
pub fn poisson_weighted_projection(model: &RelationalModel, lambda: &[f64]) -> Result<DMatrix<f64>> {
    check_positive(model, lambda)?;
    let n = model.num_cells();
    let mut proj = DMatrix::identity(n, n);
    if model.df() > 0 {
        let d = model.kernel_matrix();
        let g = DMatrix::from_fn(n, model.df(), |i, k| d[(k, i)] / lambda[i].sqrt());
        let gram_inv = inverse_spd(&(g.transpose() * &g), "G'G")
            .ok_or_else(|| Error::InvalidArgument("G'G is singular".into()))?;
        proj -= &g * gram_inv * g.transpose();
    }
    symmetrize(&mut proj);
    Ok(proj)
}

/// Covariance of the Poisson MLE at intensities `lambda`, using the
/// unweighted projection `I - D'(DD')⁻¹D` as the scaled covariance.
///
/// See [`poisson_weighted_projection`] for the finite-intensity covariance,
/// which differs when the intensities are unequal.
pub fn poisson_cov(model: &RelationalModel, lambda: &[f64]) -> Result<AsymptoticSummary> {
    check_positive(model, lambda)?;
    let scaled = poisson_projection(model);
    let root = DMatrix::from_diagonal(&DVector::from_iterator(lambda.len(), lambda.iter().map(|l| l.sqrt())));
    let mut cov = &root * &scaled * &root;
    symmetrize(&mut cov);
    Ok(AsymptoticSummary {
        rank: symmetric_rank(&scaled, 1e-8, 1.0),
        std_errors: Some(diag_sqrt(&cov)),
        estimate_cov: Some(cov),
        scaled_cov: scaled,
        residuals: None,
    })
}

/// `Σ = Δ[p] - pp'`.
pub fn multinomial_sigma(p: &[f64]) -> DMatrix<f64> {
    let pv = DVector::from_column_slice(p);
    DMatrix::from_diagonal(&pv) - &pv * pv.transpose()
}

/// `MΣM'` at probabilities `p`.
pub fn multinomial_cov(model: &RelationalModel, p: &[f64]) -> Result<AsymptoticSummary> {
    multinomial_cov_with(model, p, &CovOptions::default())
}

pub fn multinomial_cov_with(model: &RelationalModel, p: &[f64], opts: &CovOptions) -> Result<AsymptoticSummary> {
    check_probabilities(model, p, opts)?;
    let n = model.num_cells();
    let k = model.df();
    let sigma = multinomial_sigma(p);
    let sigma_scale = p.iter().fold(0.0f64, |a, &v| a.max(v * (1.0 - v)));
    let dp = DMatrix::from_diagonal(&DVector::from_column_slice(p));

    // H = (1, Δ[p⁻¹]D'), an I × (K+1) matrix.
    let d = model.kernel_matrix();
    let h = DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { d[(j - 1, i)] / p[i] });
    let inner = h.transpose() * &dp * &h;
    let inner_inv =
        inverse_spd(&inner, "H'Δ[p]H").ok_or_else(|| Error::InvalidArgument("H'Δ[p]H is singular".into()))?;
    let m = DMatrix::identity(n, n) - &dp * &h * inner_inv * h.transpose();
    let mut scaled = &m * sigma * m.transpose();
    symmetrize(&mut scaled);
    Ok(AsymptoticSummary {
        rank: symmetric_rank(&scaled, 1e-8, sigma_scale),
        scaled_cov: scaled,
        estimate_cov: None,
        std_errors: None,
        residuals: None,
    })
}

/// `Σ - D'(DΔ[p⁻¹]D')⁻¹D`, valid for models with the overall effect.
pub fn overall_effect_cov(model: &RelationalModel, p: &[f64]) -> Result<DMatrix<f64>> {
    overall_effect_cov_with(model, p, &CovOptions::default())
}

pub fn overall_effect_cov_with(model: &RelationalModel, p: &[f64], opts: &CovOptions) -> Result<DMatrix<f64>> {
    if !model.overall_effect() {
        return Err(Error::NoOverallEffect);
    }
    check_probabilities(model, p, opts)?;
    let mut cov = multinomial_sigma(p);
    if model.df() > 0 {
        let d = model.kernel_matrix();
        let inv_p = DMatrix::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|v| 1.0 / v)));
        let inner = &d * inv_p * d.transpose();
        let inner_inv =
            inverse_spd(&inner, "DΔ[p⁻¹]D'").ok_or_else(|| Error::InvalidArgument("DΔ[p⁻¹]D' is singular".into()))?;
        cov -= d.transpose() * inner_inv * &d;
    }
    symmetrize(&mut cov);
    Ok(cov)
}

/// `(u_i - v_i) / √v_i`; the squared sum is the Pearson statistic.
pub fn pearson_residuals(observed: &[f64], fitted: &[f64]) -> Result<Vec<f64>> {
    if observed.len() != fitted.len() {
        return Err(Error::DimensionMismatch {
            expected: fitted.len(),
            got: observed.len(),
        });
    }
    observed
        .iter()
        .zip(fitted)
        .enumerate()
        .map(|(cell, (&u, &v))| {
            if v > 0.0 {
                Ok((u - v) / v.sqrt())
            } else {
                Err(Error::NonPositiveFitted { cell, value: v })
            }
        })
        .collect()
}
