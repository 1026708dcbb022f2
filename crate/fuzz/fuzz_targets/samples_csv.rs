#![no_main]

use libfuzzer_sys::fuzz_target;
use relmod::io::{read_samples_csv, write_samples_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(records) = read_samples_csv(data) else { return };
    // NaN never compares equal, so only check the round trip on finite rows
    if records.iter().any(|r| {
        [r.pearson, r.lr, r.bregman, r.fitted_total, r.observed_total]
            .iter()
            .any(|v| v.is_nan())
    }) {
        return;
    }
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &records).unwrap();
    assert_eq!(read_samples_csv(buf.as_slice()).unwrap(), records);
});
