//! Relational models: design matrix, kernel basis, overall effect.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;

/// Largest number of cells accepted by [`build_model`].
pub const MAX_CELLS: usize = 128;

/// How the observed table was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingScheme {
    /// Independent Poisson counts; the parameters are intensities.
    Poisson,
    /// A multinomial sample of fixed size; the parameters are probabilities.
    Multinomial,
}

impl std::fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplingScheme::Poisson => f.write_str("poisson"),
            SamplingScheme::Multinomial => f.write_str("multinomial"),
        }
    }
}

impl std::str::FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(SamplingScheme::Poisson),
            "multinomial" => Ok(SamplingScheme::Multinomial),
            other => Err(Error::Parse(format!("unknown sampling scheme `{other}`"))),
        }
    }
}

/// One named effect: the set of cells it is attached to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectSpec {
    pub name: String,
    pub cells: Vec<usize>,
}

/// On-disk description of a model.
///
/// ```json
/// {"cells": ["10", "01", "11"],
///  "effects": [{"name": "fish", "cells": [0, 2]}, {"name": "sugarcane", "cells": [1, 2]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub cells: Vec<String>,
    pub effects: Vec<EffectSpec>,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("model file, line {} column {}: {e}", e.line(), e.column())))
    }

    /// Pretty-printed JSON with fixed field order and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model spec serializes");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<RelationalModel> {
        RelationalModel::from_spec(self.clone())
    }
}

/// A validated relational model `log δ = A'θ`.
///
/// Immutable after construction. The kernel basis `D` has integer rows that
/// span `Ker(A)`; the model is equivalently `D log δ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalModel {
    cell_labels: Vec<String>,
    effect_names: Vec<String>,
    design: Vec<Vec<u8>>,
    kernel_basis: Vec<Vec<i64>>,
    overall_effect: bool,
}

/// Builds a model from cell labels and unnamed effect subsets.
///
/// Effects are named `e1`, `e2`, ... in the order given.
pub fn build_model(cell_labels: &[String], effect_subsets: &[Vec<usize>]) -> Result<RelationalModel> {
    let spec = ModelSpec {
        cells: cell_labels.to_vec(),
        effects: effect_subsets
            .iter()
            .enumerate()
            .map(|(j, cells)| EffectSpec {
                name: format!("e{}", j + 1),
                cells: cells.clone(),
            })
            .collect(),
    };
    RelationalModel::from_spec(spec)
}

/// Exact rank and canonical integer kernel basis of a 0/1 matrix.
///
/// The basis comes from the reduced row echelon form: one row per non-pivot
/// column, in increasing column order, in lowest integer terms with the first
/// nonzero entry positive.
pub fn rank_and_kernel(design: &[Vec<u8>]) -> Result<(usize, Vec<Vec<i64>>)> {
    let ncols = design.first().map_or(0, Vec::len);
    let m = to_i64(design);
    let reduced = exact::rref(&m, ncols);
    let kernel = exact::integer_kernel(&reduced)?;
    Ok((reduced.rank(), kernel))
}

/// True iff the all-ones vector lies in the row space of `design`.
pub fn has_overall_effect(design: &[Vec<u8>]) -> bool {
    let ncols = design.first().map_or(0, Vec::len);
    let mut m = to_i64(design);
    let r = exact::rank(&m, ncols);
    m.push(vec![1; ncols]);
    exact::rank(&m, ncols) == r
}

fn to_i64(design: &[Vec<u8>]) -> Vec<Vec<i64>> {
    design
        .iter()
        .map(|r| r.iter().map(|&v| i64::from(v)).collect())
        .collect()
}

impl RelationalModel {
    pub fn from_spec(spec: ModelSpec) -> Result<Self> {
        let n = spec.cells.len();
        if n == 0 {
            return Err(Error::NoCells);
        }
        if n > MAX_CELLS {
            return Err(Error::TooManyCells {
                cells: n,
                max: MAX_CELLS,
            });
        }
        let mut design = Vec::with_capacity(spec.effects.len());
        for (j, effect) in spec.effects.iter().enumerate() {
            if effect.cells.is_empty() {
                return Err(Error::EmptySubset { effect: j });
            }
            let mut row = vec![0u8; n];
            for &i in &effect.cells {
                if i >= n {
                    return Err(Error::IndexOutOfRange {
                        effect: j,
                        index: i,
                        cells: n,
                    });
                }
                if row[i] == 1 {
                    return Err(Error::DuplicateIndex { effect: j, index: i });
                }
                row[i] = 1;
            }
            if let Some(first) = design.iter().position(|r: &Vec<u8>| *r == row) {
                return Err(Error::DuplicateSubset { first, second: j });
            }
            design.push(row);
        }
        for i in 0..n {
            if !design.iter().any(|r| r[i] == 1) {
                return Err(Error::EmptyColumn {
                    cell: i,
                    label: spec.cells[i].clone(),
                });
            }
        }
        let (rank, kernel_basis) = rank_and_kernel(&design)?;
        if rank != design.len() {
            return Err(Error::RankDeficient {
                rank,
                rows: design.len(),
            });
        }
        let overall_effect = has_overall_effect(&design);
        Ok(RelationalModel {
            cell_labels: spec.cells,
            effect_names: spec.effects.into_iter().map(|e| e.name).collect(),
            design,
            kernel_basis,
            overall_effect,
        })
    }

    /// Number of cells `I`.
    pub fn num_cells(&self) -> usize {
        self.cell_labels.len()
    }

    /// Number of effects `J` (rows of the design matrix, equal to its rank).
    pub fn num_effects(&self) -> usize {
        self.design.len()
    }

    /// Degrees of freedom `K = I - rank(A) = dim Ker(A)`.
    pub fn df(&self) -> usize {
        self.kernel_basis.len()
    }

    pub fn overall_effect(&self) -> bool {
        self.overall_effect
    }

    pub fn cell_labels(&self) -> &[String] {
        &self.cell_labels
    }

    pub fn effect_names(&self) -> &[String] {
        &self.effect_names
    }

    pub fn design(&self) -> &[Vec<u8>] {
        &self.design
    }

    pub fn kernel_basis(&self) -> &[Vec<i64>] {
        &self.kernel_basis
    }

    /// Cells of effect `j`.
    pub fn effect_cells(&self, j: usize) -> Vec<usize> {
        self.design[j]
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == 1).then_some(i))
            .collect()
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            cells: self.cell_labels.clone(),
            effects: (0..self.num_effects())
                .map(|j| EffectSpec {
                    name: self.effect_names[j].clone(),
                    cells: self.effect_cells(j),
                })
                .collect(),
        }
    }

    /// `A` as a `J × I` floating point matrix.
    pub fn design_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.num_effects(), self.num_cells(), |j, i| {
            f64::from(self.design[j][i])
        })
    }

    /// `D` as a `K × I` floating point matrix.
    pub fn kernel_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.df(), self.num_cells(), |k, i| self.kernel_basis[k][i] as f64)
    }

    /// `A v`.
    pub fn subset_sums(&self, v: &[f64]) -> Vec<f64> {
        self.design
            .iter()
            .map(|row| row.iter().zip(v).filter(|(&a, _)| a == 1).map(|(_, x)| x).sum())
            .collect()
    }

    /// `D log v`, the generalized log odds ratios that vanish on the model.
    pub fn log_odds_ratios(&self, v: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = v.iter().map(|x| x.ln()).collect();
        self.kernel_basis
            .iter()
            .map(|row| row.iter().zip(&logs).map(|(&d, l)| d as f64 * l).sum())
            .collect()
    }

    /// `max |D log v|`, or infinity if some entry of `v` is not positive.
    pub fn model_residual(&self, v: &[f64]) -> f64 {
        if v.iter().any(|x| !(*x > 0.0)) {
            return f64::INFINITY;
        }
        self.log_odds_ratios(v).into_iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Returns a copy using `basis` instead of the canonical kernel basis.
    ///
    /// `basis` must have `K` rows that are exactly orthogonal to every row of
    /// the design and linearly independent.
    pub fn with_kernel_basis(&self, basis: Vec<Vec<i64>>) -> Result<Self> {
        let n = self.num_cells();
        if basis.len() != self.df() {
            return Err(Error::DimensionMismatch {
                expected: self.df(),
                got: basis.len(),
            });
        }
        if let Some(row) = basis.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        for row in &basis {
            for a in &self.design {
                let dot: i128 = a.iter().zip(row).map(|(&x, &d)| i128::from(x) * i128::from(d)).sum();
                if dot != 0 {
                    return Err(Error::InvalidArgument(
                        "basis row is not in the kernel of the design".into(),
                    ));
                }
            }
        }
        let rank = exact::rank(&basis, n);
        if rank != self.df() {
            return Err(Error::RankDeficient {
                rank,
                rows: basis.len(),
            });
        }
        Ok(RelationalModel {
            kernel_basis: basis,
            ..self.clone()
        })
    }

    /// Returns a copy whose cells are reordered so that new cell `i` is old
    /// cell `perm[i]`.
    pub fn permute_cells(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_cells();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut inverse = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n || inverse[old] != usize::MAX {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let spec = self.to_spec();
        let permuted = ModelSpec {
            cells: perm.iter().map(|&old| spec.cells[old].clone()).collect(),
            effects: spec
                .effects
                .into_iter()
                .map(|e| {
                    let mut cells: Vec<usize> = e.cells.iter().map(|&old| inverse[old]).collect();
                    cells.sort_unstable();
                    EffectSpec { name: e.name, cells }
                })
                .collect(),
        };
        RelationalModel::from_spec(permuted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn crab() -> RelationalModel {
        build_model(&labels(&["10", "01", "11"]), &[vec![0, 2], vec![1, 2]]).unwrap()
    }

    #[test]
    fn crab_model_structure() {
        let m = crab();
        assert_eq!(m.design(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(m.df(), 1);
        assert!(!m.overall_effect());
        assert_eq!(m.kernel_basis(), &[vec![1, 1, -1]]);
    }

    #[test]
    fn saturated_two_cells() {
        let m = build_model(&labels(&["a", "b"]), &[vec![0], vec![1]]).unwrap();
        assert_eq!(m.df(), 0);
        assert!(m.overall_effect());
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn independence_2x2_without_redundant_row() {
        let m = build_model(
            &labels(&["11", "12", "21", "22"]),
            &[vec![0, 1], vec![2, 3], vec![0, 2]],
        )
        .unwrap();
        assert!(m.overall_effect());
        assert_eq!(m.df(), 1);
        assert_eq!(m.kernel_basis(), &[vec![1, -1, -1, 1]]);
    }

    #[test]
    fn full_independence_2x2_is_rank_deficient() {
        let err = build_model(
            &labels(&["11", "12", "21", "22"]),
            &[vec![0, 1], vec![2, 3], vec![0, 2], vec![1, 3]],
        )
        .unwrap_err();
        assert_eq!(err, Error::RankDeficient { rank: 3, rows: 4 });
    }

    #[test]
    fn construction_errors() {
        let l = labels(&["a", "b", "c"]);
        assert_eq!(
            build_model(&l, &[vec![0, 1], vec![1, 0], vec![2]]).unwrap_err(),
            Error::DuplicateSubset { first: 0, second: 1 }
        );
        assert!(matches!(
            build_model(&l, &[vec![0, 1]]).unwrap_err(),
            Error::EmptyColumn { cell: 2, .. }
        ));
        assert!(matches!(
            build_model(&l, &[vec![0, 3]]).unwrap_err(),
            Error::IndexOutOfRange { index: 3, .. }
        ));
        assert_eq!(
            build_model(&l, &[vec![0, 0, 1, 2]]).unwrap_err(),
            Error::DuplicateIndex { effect: 0, index: 0 }
        );
        assert_eq!(
            build_model(&l, &[vec![], vec![0, 1, 2]]).unwrap_err(),
            Error::EmptySubset { effect: 0 }
        );
        assert_eq!(build_model(&[], &[]).unwrap_err(), Error::NoCells);
        let many: Vec<String> = (0..=MAX_CELLS).map(|i| i.to_string()).collect();
        let all: Vec<usize> = (0..=MAX_CELLS).collect();
        assert!(matches!(
            build_model(&many, &[all]).unwrap_err(),
            Error::TooManyCells { .. }
        ));
    }

    #[test]
    fn rank_and_kernel_examples() {
        let (r, k) = rank_and_kernel(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!((r, k), (2, vec![vec![1, 1, -1]]));
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(rank_and_kernel(&id).unwrap(), (3, vec![]));
        let (r, _) = rank_and_kernel(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(r, 1);
    }

    #[test]
    fn overall_effect_examples() {
        assert!(!has_overall_effect(&[vec![1, 0, 1], vec![0, 1, 1]]));
        assert!(has_overall_effect(&[vec![1, 0], vec![0, 1]]));
        assert!(has_overall_effect(&[vec![1, 1, 1], vec![0, 1, 1]]));
    }

    #[test]
    fn spec_round_trip() {
        let m = crab();
        let json = m.to_spec().to_canonical_json();
        let back = ModelSpec::from_json(&json).unwrap();
        assert_eq!(back.to_canonical_json(), json);
        assert_eq!(back.build().unwrap(), m);
    }

    #[test]
    fn alternative_kernel_basis() {
        let m = crab();
        assert!(m.with_kernel_basis(vec![vec![-2, -2, 2]]).is_ok());
        assert!(m.with_kernel_basis(vec![vec![1, 0, -1]]).is_err());
        assert!(m.with_kernel_basis(vec![vec![0, 0, 0]]).is_err());
        assert!(m.with_kernel_basis(vec![]).is_err());
    }

    #[test]
    fn parse_error_reports_position() {
        let err = ModelSpec::from_json("{\"cells\": [\"a\"],\n \"effects\": [}").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
