#![allow(dead_code)]

use proptest::prelude::*;
use relmod::{build_model, RelationalModel};

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

/// Fish / sugarcane / both; no overall effect.
pub fn crab() -> RelationalModel {
    build_model(&labels(3), &[vec![0, 2], vec![1, 2]]).unwrap()
}

pub fn saturated(n: usize) -> RelationalModel {
    let subsets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    build_model(&labels(n), &subsets).unwrap()
}

/// 2×2 independence with the redundant second column effect dropped.
pub fn independence_2x2() -> RelationalModel {
    build_model(&labels(4), &[vec![0, 1], vec![2, 3], vec![0, 2]]).unwrap()
}

/// 2×3 independence: rows, and the first two columns.
pub fn independence_2x3() -> RelationalModel {
    build_model(&labels(6), &[vec![0, 1, 2], vec![3, 4, 5], vec![0, 3], vec![1, 4]]).unwrap()
}

/// Overall effect plus one subset effect on 4 cells.
pub fn overall_plus_subset() -> RelationalModel {
    build_model(&labels(4), &[vec![0, 1, 2, 3], vec![0, 1]]).unwrap()
}

/// Four cells, two overlapping subsets, no overall effect.
pub fn overlapping_no_overall() -> RelationalModel {
    build_model(&labels(4), &[vec![0, 1, 3], vec![1, 2, 3]]).unwrap()
}

pub fn overall_effect_models() -> Vec<RelationalModel> {
    vec![
        saturated(3),
        independence_2x2(),
        independence_2x3(),
        overall_plus_subset(),
    ]
}

/// Random valid models with 2..=7 cells.
pub fn arb_model() -> impl Strategy<Value = RelationalModel> {
    (2usize..=7)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 1..=n),
            )
        })
        .prop_filter_map("invalid design", |(n, rows)| {
            let subsets: Vec<Vec<usize>> = rows.iter().map(|r| (0..n).filter(|&i| r[i]).collect()).collect();
            build_model(&labels(n), &subsets).ok()
        })
}

/// Parameters `exp(A'θ)` of `model`, which lie in the model by construction.
pub fn in_model(model: &RelationalModel, theta: &[f64]) -> Vec<f64> {
    (0..model.num_cells())
        .map(|i| {
            model
                .design()
                .iter()
                .zip(theta)
                .map(|(row, t)| f64::from(row[i]) * t)
                .sum::<f64>()
                .exp()
        })
        .collect()
}

pub fn normalized(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}
