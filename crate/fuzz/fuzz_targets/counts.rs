#![no_main]

use libfuzzer_sys::fuzz_target;
use relmod::io::parse_counts;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_counts(text) {
        assert!(!table.is_empty());
        let plain: Vec<String> = table.counts().iter().map(u64::to_string).collect();
        assert_eq!(parse_counts(&plain.join(" ")).unwrap(), table);
    }
});
