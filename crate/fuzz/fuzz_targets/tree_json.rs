#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::tree::parse_tree_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_tree_json(text) {
        assert_eq!(parse_tree_json(&t.to_json()).unwrap(), t);
    }
});
