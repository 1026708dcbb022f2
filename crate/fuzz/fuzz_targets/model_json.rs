#![no_main]

use libfuzzer_sys::fuzz_target;
use relmod::ModelSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ModelSpec::from_json(text) else { return };
    // canonical form is a fixed point
    let canonical = spec.to_canonical_json();
    let again = ModelSpec::from_json(&canonical).expect("canonical JSON parses");
    assert_eq!(again.to_canonical_json(), canonical);
    if let Ok(model) = spec.build() {
        assert_eq!(model.num_effects() + model.df(), model.num_cells());
        for d in model.kernel_basis() {
            for a in model.design() {
                let dot: i64 = a.iter().zip(d).map(|(&x, &y)| i64::from(x) * y).sum();
                assert_eq!(dot, 0);
            }
        }
        assert_eq!(model.to_spec().build().unwrap(), model);
    }
});
