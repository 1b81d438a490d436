#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::crf::{parse_crf, parse_crf_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_crf_bytes(data) {
        let text = m.to_text();
        assert_eq!(parse_crf(&text).unwrap().to_text(), text);
    }
});
