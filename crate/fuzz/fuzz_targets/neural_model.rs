#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::neural::{parse_neural, parse_neural_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_neural_bytes(data) {
        let text = m.to_text();
        assert_eq!(parse_neural(&text).unwrap().to_text(), text);
    }
});
