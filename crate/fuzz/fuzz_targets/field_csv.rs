#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::field::{parse_field_header, read_field_csv};

// Input: header JSON, a NUL byte, then the CSV body.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((head, body)) = text.split_once('\0') else { return };
    if let Ok(h) = parse_field_header(head) {
        if let Ok(f) = read_field_csv(&h, body) {
            assert_eq!(read_field_csv(&h, &f.to_csv()).unwrap(), f);
        }
    }
});
