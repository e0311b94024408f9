#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::field::{parse_field_header, read_field_binary};

// Input: header JSON, a NUL byte, then the binary body.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let Ok(head) = std::str::from_utf8(&data[..split]) else { return };
    if let Ok(h) = parse_field_header(head) {
        if let Ok(f) = read_field_binary(&h, &data[split + 1..]) {
            assert_eq!(read_field_binary(&h, &f.to_binary()).unwrap(), f);
        }
    }
});
