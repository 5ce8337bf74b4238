#![no_main]

use frostlab::grid::Scale;
use frostlab::harness::{parse_shading, write_shading};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&m, rest)) = data.split_first() else {
        return;
    };
    let Ok(scale) = Scale::new(1 + (m % 12) as u32) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(rows) = parse_shading(text, scale, 64) {
        assert_eq!(parse_shading(&write_shading(&rows), scale, 64).unwrap(), rows);
    }
});
