#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::annotate::{parse_review, parse_review_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = parse_review_bytes(data) {
        let text = r.to_text();
        assert_eq!(parse_review(&text).unwrap().to_text(), text);
    }
});
