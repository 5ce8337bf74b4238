#![no_main]

use frostlab::harness::{parse_set, write_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = parse_set(text) {
        // anything accepted must survive a write/parse round trip
        assert_eq!(parse_set(&write_set(&set)).unwrap(), set);
    }
});
