#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::hmm::{parse_hmm, parse_hmm_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_hmm_bytes(data) {
        let text = m.to_text();
        assert_eq!(parse_hmm(&text).unwrap().to_text(), text);
    }
});
