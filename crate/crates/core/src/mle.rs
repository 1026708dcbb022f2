//! Maximum likelihood under a relational model.
//!
//! Both sampling schemes are fitted by damped Newton iterations in the
//! log-linear parameter `θ`, where the cell parameters are `exp(A'θ)` and
//! therefore satisfy `D log δ = 0` by construction.
//!
//! * Poisson: maximize `y'A'θ - 1'exp(A'θ)`, strictly concave because `A`
//!   has full row rank. At the optimum `Aλ = Ay`.
//! * Multinomial: the stationarity conditions are `Ay = μ A p` and `1'p = 1`
//!   for a scalar multiplier `μ`. For fixed `μ` this is the Poisson problem
//!   with data `y/μ`, whose total is strictly decreasing in `μ`, so `μ` is
//!   found by a safeguarded scalar Newton iteration on `log μ`.
//!
//! When some counts are zero the supremum may be approached only on the
//! boundary. The Poisson iteration then drives the parameters of some zero
//! cells towards 0; once they fall below `existence_threshold` times the mean
//! count and progress has stalled, the fit is declared nonexistent and the
//! augmented estimate is returned instead.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, solve_spd};
use crate::model::{RelationalModel, SamplingScheme};

/// Tuning knobs of the Newton solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative KKT residual at which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// A zero cell whose parameter drops below this multiple of the mean
    /// count is taken as evidence that the MLE does not exist.
    pub existence_threshold: f64,
    /// Relative objective improvement treated as stalled.
    pub improvement_floor: f64,
    /// Step halvings allowed per Newton iteration.
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 500,
            existence_threshold: 1e-12,
            improvement_floor: 1e-13,
            max_halvings: 60,
        }
    }
}

/// Observed cell counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedTable {
    counts: Vec<u64>,
}

impl ObservedTable {
    pub fn new(counts: Vec<u64>) -> Self {
        ObservedTable { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

impl From<Vec<u64>> for ObservedTable {
    fn from(counts: Vec<u64>) -> Self {
        ObservedTable::new(counts)
    }
}

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub scheme: SamplingScheme,
    /// Intensities `λ̂` (Poisson) or probabilities `p̂` (multinomial).
    pub estimate: Vec<f64>,
    /// Log-linear parameters with `log estimate = A'θ`; empty for the augmented fallback.
    pub theta: Vec<f64>,
    /// Multipliers `α` of the constraints `D log δ = 0`.
    pub lagrange: Vec<f64>,
    /// Multiplier `α₀` of the normalization `1'p = 1` (multinomial only).
    pub alpha0: Option<f64>,
    /// Common ratio `γ` in `A p̂ = γ A(y/N)` (multinomial only).
    pub proportionality: Option<f64>,
    /// False when the MLE does not exist and the augmented estimate was returned.
    pub existed: bool,
    /// Augmented estimate of an all-zero table.
    pub degenerate: bool,
    pub kkt_residual: f64,
    pub iterations: usize,
}

impl FitResult {
    /// Expected counts: `λ̂`, or `N p̂` for multinomial fits.
    pub fn fitted_counts(&self, total: u64) -> Vec<f64> {
        match self.scheme {
            SamplingScheme::Poisson => self.estimate.clone(),
            SamplingScheme::Multinomial => self.estimate.iter().map(|p| p * total as f64).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("fit result: {e}")))
    }
}

fn check_dims(model: &RelationalModel, y: &ObservedTable) -> Result<()> {
    if y.len() != model.num_cells() {
        return Err(Error::DimensionMismatch {
            expected: model.num_cells(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Poisson MLE of the intensities, or the augmented estimate if the MLE does
/// not exist.
pub fn fit_poisson(model: &RelationalModel, y: &ObservedTable, opts: &SolverOptions) -> Result<FitResult> {
    check_dims(model, y)?;
    let total = y.total();
    if total == 0 {
        return Ok(augmented(model, SamplingScheme::Poisson, 0.0));
    }
    let yf = y.as_f64();
    let a = model.design_matrix();
    let solve = newton_poisson(&a, &yf, None, opts)?;
    if solve.outcome == Outcome::Nonexistent {
        return Ok(augmented(model, SamplingScheme::Poisson, total as f64));
    }

    let lambda = solve.lambda;
    let diff: Vec<f64> = lambda.iter().zip(&yf).map(|(l, y)| l - y).collect();
    let alpha = kernel_coordinates(model, &diff);
    let kkt = [
        solve.residual,
        max_abs(model.log_odds_ratios(&lambda)),
        lagrange_residual(model, &alpha, &diff),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(FitResult {
        scheme: SamplingScheme::Poisson,
        estimate: lambda,
        theta: solve.theta.iter().copied().collect(),
        lagrange: alpha,
        alpha0: None,
        proportionality: None,
        existed: true,
        degenerate: false,
        kkt_residual: kkt,
        iterations: solve.iterations,
    })
}

/// Multinomial MLE of the cell probabilities, or the augmented estimate if
/// the MLE does not exist.
pub fn fit_multinomial(model: &RelationalModel, y: &ObservedTable, opts: &SolverOptions) -> Result<FitResult> {
    check_dims(model, y)?;
    let total = y.total();
    if total == 0 {
        return Err(Error::ZeroTotal);
    }
    let n = total as f64;
    let yf = y.as_f64();
    let a = model.design_matrix();
    let inner_opts = SolverOptions {
        tol: opts.tol.min(1e-13),
        ..*opts
    };

    let mut log_mu = n.ln();
    let mut data: Vec<f64> = yf.iter().map(|v| v / n).collect();
    let mut solve = newton_poisson(&a, &data, None, &inner_opts)?;
    if solve.outcome == Outcome::Nonexistent {
        return Ok(augmented(model, SamplingScheme::Multinomial, n));
    }
    let mut iterations = solve.iterations;
    // log μ brackets: total(μ) - 1 is positive below `lo`, negative above `hi`.
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut converged = false;
    for _ in 0..200 {
        let t: f64 = solve.lambda.iter().sum();
        let h = t.ln();
        if (t - 1.0).abs() <= 1e-13 {
            converged = true;
            break;
        }
        if h > 0.0 {
            lo = lo.max(log_mu);
        } else {
            hi = hi.min(log_mu);
        }
        // d log t / d log μ = -c'(AΔλA')⁻¹c / t with c = Aλ.
        let c = &a * DVector::from_column_slice(&solve.lambda);
        let hess = weighted_gram(&a, &solve.lambda);
        let slope = match solve_spd(&hess, &c) {
            Some(x) => -c.dot(&x) / t,
            None => f64::NAN,
        };
        let mut next = log_mu - h / slope;
        if !next.is_finite() || (next - log_mu).abs() > 5.0 {
            next = log_mu + 5.0f64.copysign(h);
        }
        if next <= lo || next >= hi {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + 1.0
            } else {
                hi - 1.0
            };
        }
        if (next - log_mu).abs() <= 4.0 * f64::EPSILON * log_mu.abs().max(1.0) {
            converged = (t - 1.0).abs() <= opts.tol;
            break;
        }
        log_mu = next;
        let mu = log_mu.exp();
        data = yf.iter().map(|v| v / mu).collect();
        solve = newton_poisson(&a, &data, Some(solve.theta), &inner_opts)?;
        iterations += solve.iterations;
        if solve.outcome == Outcome::Nonexistent {
            return Ok(augmented(model, SamplingScheme::Multinomial, n));
        }
    }
    let p = solve.lambda;
    let t: f64 = p.iter().sum();
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            residual: (t - 1.0).abs(),
        });
    }

    let mu = log_mu.exp();
    let alpha0 = n - mu;
    let diff: Vec<f64> = p.iter().zip(&yf).map(|(p, y)| mu * p - y).collect();
    let alpha = kernel_coordinates(model, &diff);
    let ap = model.subset_sums(&p);
    let ay = model.subset_sums(&yf);
    let stationarity = max_abs(ay.iter().zip(&ap).map(|(y, p)| (y - mu * p) / mu));
    let kkt = [
        (t - 1.0).abs(),
        stationarity,
        max_abs(model.log_odds_ratios(&p)),
        lagrange_residual(model, &alpha, &diff),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(FitResult {
        scheme: SamplingScheme::Multinomial,
        estimate: p,
        theta: solve.theta.iter().copied().collect(),
        lagrange: alpha,
        alpha0: Some(alpha0),
        proportionality: Some(n / mu),
        existed: true,
        degenerate: false,
        kkt_residual: kkt,
        iterations,
    })
}

/// The augmented MLE: the genuine MLE when it exists, otherwise the constant
/// vector `(1'y/I)1` (Poisson) or `(1/I)1` (multinomial) with zero multipliers.
///
/// Only dimension errors and solver failures are reported; zero counts never
/// cause an error.
pub fn fit_augmented(
    model: &RelationalModel,
    y: &ObservedTable,
    scheme: SamplingScheme,
    opts: &SolverOptions,
) -> Result<FitResult> {
    check_dims(model, y)?;
    match scheme {
        SamplingScheme::Poisson => fit_poisson(model, y, opts),
        SamplingScheme::Multinomial if y.total() == 0 => {
            let mut fit = augmented(model, SamplingScheme::Multinomial, 0.0);
            fit.degenerate = true;
            Ok(fit)
        }
        SamplingScheme::Multinomial => fit_multinomial(model, y, opts),
    }
}

/// Whether the constrained likelihood attains its supremum at a strictly
/// positive parameter. Agrees with the `existed` flag of the fitting routines.
pub fn mle_exists(model: &RelationalModel, y: &ObservedTable, scheme: SamplingScheme) -> Result<bool> {
    check_dims(model, y)?;
    if y.counts().iter().all(|&c| c > 0) {
        return Ok(true);
    }
    if y.total() == 0 {
        return Ok(false);
    }
    Ok(fit_augmented(model, y, scheme, &SolverOptions::default())?.existed)
}

fn augmented(model: &RelationalModel, scheme: SamplingScheme, total: f64) -> FitResult {
    let i = model.num_cells() as f64;
    let value = match scheme {
        SamplingScheme::Poisson => total / i,
        SamplingScheme::Multinomial => 1.0 / i,
    };
    FitResult {
        scheme,
        estimate: vec![value; model.num_cells()],
        theta: Vec::new(),
        lagrange: vec![0.0; model.df()],
        alpha0: (scheme == SamplingScheme::Multinomial).then_some(0.0),
        proportionality: None,
        existed: false,
        degenerate: total == 0.0,
        kkt_residual: 0.0,
        iterations: 0,
    }
}

/// Coordinates of `v` in the row space of `D`: `(DD')⁻¹ D v`.
fn kernel_coordinates(model: &RelationalModel, v: &[f64]) -> Vec<f64> {
    if model.df() == 0 {
        return Vec::new();
    }
    let d = model.kernel_matrix();
    let gram = &d * d.transpose();
    let rhs = &d * DVector::from_column_slice(v);
    solve_spd(&gram, &rhs)
        .map(|x| x.iter().copied().collect())
        .unwrap_or_else(|| vec![f64::NAN; model.df()])
}

/// `max |D'α - v|`.
fn lagrange_residual(model: &RelationalModel, alpha: &[f64], v: &[f64]) -> f64 {
    if model.df() == 0 {
        return max_abs(v.iter().copied());
    }
    let d = model.kernel_matrix();
    let fitted = d.transpose() * DVector::from_column_slice(alpha);
    max_abs(fitted.iter().zip(v).map(|(a, b)| a - b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Converged,
    Nonexistent,
}

#[derive(Debug, Clone)]
struct PoissonSolve {
    theta: DVector<f64>,
    lambda: Vec<f64>,
    residual: f64,
    iterations: usize,
    outcome: Outcome,
}

/// `A Δ[w] A'`.
fn weighted_gram(a: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut scaled = a.clone();
    for (mut col, &wi) in scaled.column_iter_mut().zip(w) {
        col *= wi;
    }
    scaled * a.transpose()
}

fn intensities(a: &DMatrix<f64>, theta: &DVector<f64>) -> Vec<f64> {
    (a.transpose() * theta).iter().map(|v| v.exp()).collect()
}

/// Least-squares start: `A'θ ≈ log((y + 1/2) · 1'y / (1'y + I/2))`.
fn initial_theta(a: &DMatrix<f64>, y: &[f64]) -> DVector<f64> {
    let total: f64 = y.iter().sum();
    let cells = y.len() as f64;
    let target = DVector::from_iterator(
        y.len(),
        y.iter().map(|v| ((v + 0.5) * total / (total + cells / 2.0)).ln()),
    );
    let gram = a * a.transpose();
    solve_spd(&gram, &(a * target)).unwrap_or_else(|| DVector::zeros(a.nrows()))
}

/// Damped Newton ascent on `b'θ - 1'exp(A'θ)` with `b = Ay`.
fn newton_poisson(
    a: &DMatrix<f64>,
    y: &[f64],
    start: Option<DVector<f64>>,
    opts: &SolverOptions,
) -> Result<PoissonSolve> {
    let b = a * DVector::from_column_slice(y);
    let res_scale = 1.0 + max_abs(b.iter().copied());
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let zero_cells: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 0.0).collect();
    let zero_min = |lambda: &[f64]| zero_cells.iter().map(|&i| lambda[i]).fold(f64::INFINITY, f64::min);
    let objective = |theta: &DVector<f64>, lambda: &[f64]| b.dot(theta) - lambda.iter().sum::<f64>();

    let mut theta = start.unwrap_or_else(|| initial_theta(a, y));
    let mut lambda = intensities(a, &theta);
    let mut f = objective(&theta, &lambda);
    let mut improvement = f64::INFINITY;
    let mut prev_zero_min = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for it in 0..=opts.max_iter {
        let grad = &b - a * DVector::from_column_slice(&lambda);
        residual = max_abs(grad.iter().copied());
        let converged = residual <= opts.tol * res_scale;
        let smallest_zero = zero_min(&lambda);
        let stalled = improvement <= opts.improvement_floor * (1.0 + f.abs());
        if smallest_zero < opts.existence_threshold * mean && (converged || stalled) {
            return Ok(PoissonSolve {
                theta,
                lambda,
                residual,
                iterations: it,
                outcome: Outcome::Nonexistent,
            });
        }
        // Keep going while zero cells are still collapsing towards 0.
        let vanishing = smallest_zero < 1e-6 * mean && smallest_zero < 0.5 * prev_zero_min;
        if converged && !vanishing {
            // one more full step is nearly free and takes the error to roundoff
            if let Some(step) = solve_spd(&weighted_gram(a, &lambda), &grad) {
                let cand = &theta + step;
                let cand_lambda = intensities(a, &cand);
                let cand_res = max_abs((&b - a * DVector::from_column_slice(&cand_lambda)).iter().copied());
                if cand_res < residual {
                    theta = cand;
                    lambda = cand_lambda;
                    residual = cand_res;
                }
            }
            return Ok(PoissonSolve {
                theta,
                lambda,
                residual,
                iterations: it,
                outcome: Outcome::Converged,
            });
        }
        if it == opts.max_iter {
            break;
        }
        prev_zero_min = smallest_zero;

        let hess = weighted_gram(a, &lambda);
        let Some(step) = solve_spd(&hess, &grad) else {
            break;
        };
        let slack = 1e-14 * (1.0 + f.abs());
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let cand = &theta + scale * &step;
            let cand_lambda = intensities(a, &cand);
            let cand_f = objective(&cand, &cand_lambda);
            if cand_f.is_finite() && cand_f >= f - slack {
                improvement = cand_f - f;
                theta = cand;
                lambda = cand_lambda;
                f = cand_f;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            improvement = 0.0;
            if !(smallest_zero < opts.existence_threshold * mean) {
                break;
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    fn crab() -> RelationalModel {
        build_model(&labels(3), &[vec![0, 2], vec![1, 2]]).unwrap()
    }

    fn saturated(n: usize) -> RelationalModel {
        let subsets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        build_model(&labels(n), &subsets).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn crab_poisson_matches_closed_form() {
        let fit = fit_poisson(&crab(), &vec![11, 2, 36].into(), &opts()).unwrap();
        let t = 43.0 - 63f64.sqrt();
        let expect = [47.0 - t, 38.0 - t, t];
        for (a, b) in fit.estimate.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(fit.existed);
        assert_eq!(fit.lagrange.len(), 1);
        // D'α = λ̂ - y
        let diff: Vec<f64> = fit.estimate.iter().zip([11.0, 2.0, 36.0]).map(|(l, y)| l - y).collect();
        let alpha = fit.lagrange[0];
        for (d, v) in [1.0, 1.0, -1.0].iter().zip(&diff) {
            assert!((d * alpha - v).abs() < 1e-9);
        }
        assert!(fit.kkt_residual < 1e-8);
    }

    #[test]
    fn observed_vector_already_in_model() {
        let fit = fit_poisson(&crab(), &vec![5, 8, 40].into(), &opts()).unwrap();
        for (a, b) in fit.estimate.iter().zip([5.0, 8.0, 40.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(fit.lagrange[0].abs() < 1e-9);
    }

    #[test]
    fn saturated_poisson_returns_data() {
        let fit = fit_poisson(&saturated(3), &vec![4, 9, 1].into(), &opts()).unwrap();
        for (a, b) in fit.estimate.iter().zip([4.0, 9.0, 1.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(fit.lagrange.is_empty());
    }

    #[test]
    fn multinomial_feasible_empirical_distribution() {
        let fit = fit_multinomial(&crab(), &vec![3, 10, 2].into(), &opts()).unwrap();
        for (a, b) in fit.estimate.iter().zip([0.2, 2.0 / 3.0, 2.0 / 15.0]) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((fit.proportionality.unwrap() - 1.0).abs() < 1e-10);
        assert!(fit.alpha0.unwrap().abs() < 1e-8);
    }

    #[test]
    fn multinomial_saturated() {
        let fit = fit_multinomial(&saturated(2), &vec![3, 7].into(), &opts()).unwrap();
        assert!((fit.estimate[0] - 0.3).abs() < 1e-12);
        assert!((fit.estimate[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn multinomial_alpha_satisfies_stationarity() {
        let y = [11.0, 2.0, 36.0];
        let fit = fit_multinomial(&crab(), &vec![11, 2, 36].into(), &opts()).unwrap();
        let a0 = fit.alpha0.unwrap();
        let alpha = fit.lagrange[0];
        // y - N p + α₀ p + D'α = 0
        for i in 0..3 {
            let d = [1.0, 1.0, -1.0][i];
            let r = y[i] - 49.0 * fit.estimate[i] + a0 * fit.estimate[i] + d * alpha;
            assert!(r.abs() < 1e-8, "{r}");
        }
    }

    #[test]
    fn nonexistence_is_detected() {
        let fit = fit_poisson(&crab(), &vec![5, 0, 0].into(), &opts()).unwrap();
        assert!(!fit.existed);
        assert_eq!(fit.estimate, vec![5.0 / 3.0; 3]);
        assert_eq!(fit.lagrange, vec![0.0]);
        assert!(!mle_exists(&crab(), &vec![5, 0, 0].into(), SamplingScheme::Poisson).unwrap());

        let fit = fit_multinomial(&crab(), &vec![5, 0, 0].into(), &opts()).unwrap();
        assert!(!fit.existed);
        assert_eq!(fit.estimate, vec![1.0 / 3.0; 3]);
        assert_eq!(fit.alpha0, Some(0.0));

        assert!(!mle_exists(&saturated(2), &vec![0, 5].into(), SamplingScheme::Poisson).unwrap());
        assert!(!mle_exists(&saturated(2), &vec![0, 5].into(), SamplingScheme::Multinomial).unwrap());
    }

    #[test]
    fn zero_cell_with_existing_mle() {
        let y: ObservedTable = vec![0, 2, 36].into();
        let fit = fit_poisson(&crab(), &y, &opts()).unwrap();
        assert!(fit.existed);
        // (36 - t)(38 - t) = t
        let t = (75.0 - 153f64.sqrt()) / 2.0;
        assert!((fit.estimate[2] - t).abs() < 1e-9);
        assert!(mle_exists(&crab(), &y, SamplingScheme::Poisson).unwrap());
    }

    #[test]
    fn all_zero_table() {
        let y: ObservedTable = vec![0, 0, 0].into();
        let fit = fit_augmented(&crab(), &y, SamplingScheme::Poisson, &opts()).unwrap();
        assert!(!fit.existed && fit.degenerate);
        assert_eq!(fit.estimate, vec![0.0; 3]);
        let fit = fit_augmented(&crab(), &y, SamplingScheme::Multinomial, &opts()).unwrap();
        assert!(!fit.existed && fit.degenerate);
        assert_eq!(fit.estimate, vec![1.0 / 3.0; 3]);
        assert_eq!(fit_multinomial(&crab(), &y, &opts()).unwrap_err(), Error::ZeroTotal);
    }

    #[test]
    fn dimension_mismatch() {
        let y: ObservedTable = vec![1, 2].into();
        assert!(matches!(
            fit_poisson(&crab(), &y, &opts()),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            mle_exists(&crab(), &y, SamplingScheme::Poisson),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let o = SolverOptions { max_iter: 0, ..opts() };
        assert!(matches!(
            fit_poisson(&crab(), &vec![11, 2, 36].into(), &o),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn fit_result_json_round_trip() {
        let fit = fit_multinomial(&crab(), &vec![11, 2, 36].into(), &opts()).unwrap();
        assert_eq!(FitResult::from_json(&fit.to_json()).unwrap(), fit);
    }
}
