#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::wheel::parse_curve_binary;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = parse_curve_binary(data) {
        assert_eq!(parse_curve_binary(&c.to_binary()).unwrap(), c);
    }
});
