#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::wheel::parse_curve_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_curve_json(text) {
        assert_eq!(parse_curve_json(&c.to_json()).unwrap(), c);
    }
});
