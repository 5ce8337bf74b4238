#![no_main]

use frostlab::harness::{fit_table, Table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = Table::parse(text) {
        if t.header.len() >= 2 {
            let (x, y) = (t.header[0].clone(), t.header[1].clone());
            let _ = fit_table(&t, &x, &y);
        }
    }
});
