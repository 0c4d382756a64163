#![no_main]

use latosc_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::parse(text) {
        // Whatever parses must survive a render and re-parse unchanged.
        let again = RunConfig::parse(&cfg.to_text()).expect("rendered config parses");
        let mut expect = cfg;
        expect.out_dir = again.out_dir.clone();
        assert_eq!(again, expect);
    }
});
