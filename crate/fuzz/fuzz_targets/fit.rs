#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use relmod::{build_model, fit_augmented, gof_test, ObservedTable, SamplingScheme, SolverOptions, Statistic};

#[derive(Debug, Arbitrary)]
struct Input {
    /// One bit mask per effect over at most 8 cells.
    masks: Vec<u8>,
    cells: u8,
    counts: Vec<u16>,
    multinomial: bool,
}

fuzz_target!(|input: Input| {
    let n = usize::from(input.cells % 8) + 1;
    let subsets: Vec<Vec<usize>> = input
        .masks
        .iter()
        .take(n)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let Ok(model) = build_model(&labels, &subsets) else {
        return;
    };
    if input.counts.len() < n {
        return;
    }
    let y = ObservedTable::new(input.counts[..n].iter().map(|&c| u64::from(c)).collect());
    let scheme = if input.multinomial {
        SamplingScheme::Multinomial
    } else {
        SamplingScheme::Poisson
    };
    let opts = SolverOptions::default();
    match fit_augmented(&model, &y, scheme, &opts) {
        Ok(fit) => {
            assert!(fit.estimate.iter().all(|v| v.is_finite() && *v >= 0.0));
            if y.total() > 0 {
                let report = gof_test(&model, &y, scheme, &opts).unwrap();
                assert!(report.value(Statistic::Bregman) >= 0.0 && report.value(Statistic::Pearson) >= 0.0);
            }
        }
        Err(relmod::Error::NonConvergence { .. }) => {}
        Err(e) => panic!("unexpected error {e}"),
    }
});
