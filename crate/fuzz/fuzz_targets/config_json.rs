#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::report::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        let _ = cfg.validate();
        let again = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again.to_json(), cfg.to_json());
    }
});
