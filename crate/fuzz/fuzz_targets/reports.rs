#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::eval::parse_reports_bytes;

fuzz_target!(|data: &[u8]| {
    if let Ok(reports) = parse_reports_bytes(data) {
        for (name, r) in &reports {
            let again = codemix::eval::parse_reports(&r.to_kv(name)).unwrap();
            assert_eq!(again.len(), 1);
        }
    }
});
