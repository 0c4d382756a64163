#![no_main]

use latosc_cli::output::parse_header;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(h) = parse_header(&text) {
        assert!(!h.columns.is_empty());
        assert!(h.columns.iter().all(|c| !c.is_empty()));
    }
});
