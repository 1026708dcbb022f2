mod common;

use common::*;
use proptest::prelude::*;
use relmod::gof::p_value;
use relmod::special::chisq_quantile;
use relmod::{
    bregman_stat, chisq_cdf, chisq_sf, gof_test, lr_stat, pearson_stat, LrReference, ObservedTable, SamplingScheme,
    SolverOptions, Statistic,
};

// Γ(k/2) for integer k by the recursion from Γ(1) = 1 and Γ(1/2) = √π.
fn gamma_half(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut a = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while a < k as f64 / 2.0 {
        g *= a;
        a += 1.0;
    }
    g
}

// Upper tail by composite Simpson integration of the density.
fn sf_by_quadrature(x: f64, k: usize) -> f64 {
    let half = k as f64 / 2.0;
    let norm = 2f64.powf(half) * gamma_half(k);
    let density = |t: f64| t.powf(half - 1.0) * (-t / 2.0).exp() / norm;
    let upper = x + 100.0 + 20.0 * (2.0 * k as f64).sqrt() + k as f64;
    let n = 400_000;
    let h = (upper - x) / n as f64;
    let mut s = density(x) + density(upper);
    for i in 1..n {
        s += density(x + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn chisq_sf_matches_high_precision_table() {
    let table = [
        (1.0, 1, 0.31731050786291),
        (10.0, 5, 0.07523524614651),
        (100.0, 50, 3.454931382984864e-5),
        (250.0, 200, 0.009379131668826),
        (0.5, 3, 0.91889141165468),
        (30.0, 2, 3.059023205018e-7),
        (0.39771217601825, 1, 0.52827315585847),
        (0.4, 1, 0.52708925686554),
        (3.8415, 1, 0.04999877207122),
    ];
    for (x, k, expect) in table {
        let got = chisq_sf(x, k).unwrap();
        assert!((got - expect).abs() < 1e-12, "sf({x}, {k}) = {got}, expected {expect}");
    }
    // far tails: relative accuracy
    for (x, k, expect) in [(1000.0, 200, 1.5008794119e-106), (500.0, 150, 3.2047711280e-39)] {
        let got = chisq_sf(x, k).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-8, "sf({x}, {k}) = {got}");
    }
}

#[test]
fn chisq_sf_matches_quadrature() {
    for k in [1usize, 2, 3, 7, 20, 60] {
        for x in [0.5, 1.5, 4.0, 12.0, 40.0, 90.0] {
            let q = sf_by_quadrature(x, k);
            let got = chisq_sf(x, k).unwrap();
            assert!((got - q).abs() < 1e-9, "k={k} x={x}: {got} vs {q}");
        }
    }
}

#[test]
fn crab_report() {
    let model = crab();
    let y = ObservedTable::new(vec![11, 2, 36]);
    let r = gof_test(&model, &y, SamplingScheme::Poisson, &SolverOptions::default()).unwrap();
    assert_eq!(r.df, 1);
    assert!((r.pearson - 0.39771217601825).abs() < 1e-9);
    assert!((r.bregman - 0.43762319931568).abs() < 1e-9);
    assert!((r.lr - -1.43688466707186).abs() < 1e-9);
    assert_eq!(r.lr_reference, LrReference::Unsupported);
    assert!((r.p_pearson - 0.52827315585847).abs() < 1e-8);
    assert!((r.p_bregman - 0.50827187229614).abs() < 1e-8);
    let back = relmod::GofReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn multinomial_crab_report() {
    let model = crab();
    let y = ObservedTable::new(vec![11, 2, 36]);
    let r = gof_test(&model, &y, SamplingScheme::Multinomial, &SolverOptions::default()).unwrap();
    assert_eq!(r.scheme, SamplingScheme::Multinomial);
    assert!((r.pearson - 113.02946186691606).abs() < 1e-7);
    assert!((r.lr - 80.625_837_554_168_86).abs() < 1e-7);
    // totals agree, so B = G²
    assert!((r.bregman - r.lr).abs() < 1e-9);
    assert_eq!(r.lr_reference, LrReference::ChiSquared);
}

#[test]
fn zero_degrees_of_freedom() {
    assert_eq!(p_value(0.0, 0), 1.0);
    assert_eq!(p_value(1.0, 0), 0.0);
    let model = saturated(3);
    let y = ObservedTable::new(vec![3, 1, 9]);
    let r = gof_test(&model, &y, SamplingScheme::Poisson, &SolverOptions::default()).unwrap();
    assert_eq!(r.df, 0);
    assert_eq!(r.p_pearson, 1.0);
    // a zero cell leaves the saturated MLE undefined; the constant fallback does not fit
    let y = ObservedTable::new(vec![3, 0, 9]);
    let r = gof_test(&model, &y, SamplingScheme::Poisson, &SolverOptions::default()).unwrap();
    assert!(!r.existed);
    assert_eq!(r.p_pearson, 0.0);
}

#[test]
fn statistic_names_parse() {
    for s in Statistic::ALL {
        assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
    }
    assert_eq!("x2".parse::<Statistic>().unwrap(), Statistic::Pearson);
    assert_eq!("g2".parse::<Statistic>().unwrap(), Statistic::Lr);
    assert!("chi".parse::<Statistic>().is_err());
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..10).prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![Just(0.0), 0.0..100.0f64, (0u32..50).prop_map(f64::from)], n),
            proptest::collection::vec(0.01..100.0f64, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bregman_identity_and_sign((u, v) in pair()) {
        let g2 = lr_stat(&u, &v).unwrap();
        let b = bregman_stat(&u, &v).unwrap();
        let delta: f64 = v.iter().sum::<f64>() - u.iter().sum::<f64>();
        let scale = 1.0 + g2.abs() + delta.abs();
        prop_assert!((b - (g2 + 2.0 * delta)).abs() <= 1e-12 * scale, "B={} G2={} delta={}", b, g2, delta);
        prop_assert!(b >= 0.0);
        prop_assert!(pearson_stat(&u, &v).unwrap() >= 0.0);
    }

    #[test]
    fn bregman_equals_lr_when_totals_match((u, v) in pair()) {
        let total: f64 = u.iter().sum();
        prop_assume!(total > 0.0);
        let s: f64 = v.iter().sum();
        let v: Vec<f64> = v.iter().map(|x| x * total / s).collect();
        let g2 = lr_stat(&u, &v).unwrap();
        let b = bregman_stat(&u, &v).unwrap();
        prop_assert!((b - g2).abs() <= 1e-9 * (1.0 + total));
    }

    #[test]
    fn statistics_vanish_on_exact_fit(v in proptest::collection::vec(0.01..100.0f64, 1..8)) {
        prop_assert!(pearson_stat(&v, &v).unwrap().abs() < 1e-15);
        prop_assert!(lr_stat(&v, &v).unwrap().abs() < 1e-12);
        prop_assert!(bregman_stat(&v, &v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sf_and_cdf_are_complementary(x in 0.0..400.0f64, k in 1usize..150) {
        let sf = chisq_sf(x, k).unwrap();
        let cdf = chisq_cdf(x, k).unwrap();
        prop_assert!((sf + cdf - 1.0).abs() < 1e-13);
        prop_assert!((0.0..=1.0).contains(&sf));
    }

    #[test]
    fn sf_is_monotone(x in 0.0..300.0f64, dx in 0.001..5.0f64, k in 1usize..100) {
        prop_assert!(chisq_sf(x + dx, k).unwrap() <= chisq_sf(x, k).unwrap());
        prop_assert!(chisq_sf(x, k + 1).unwrap() >= chisq_sf(x, k).unwrap());
    }

    #[test]
    fn quantile_round_trip(level in 0.001..0.999f64, k in 1usize..80) {
        let q = chisq_quantile(level, k);
        prop_assert!((chisq_cdf(q, k).unwrap() - level).abs() < 1e-10);
    }
}
