#![no_main]

use libfuzzer_sys::fuzz_target;
use relmod::io::{matrix_from_csv, matrix_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = matrix_from_csv(text) {
        if m.nrows() > 0 && m.ncols() > 0 {
            assert_eq!(matrix_from_csv(&matrix_to_csv(&m)).unwrap(), m);
        }
    }
});
