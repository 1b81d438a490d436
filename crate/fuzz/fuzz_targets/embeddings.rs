#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::embed::{parse_embeddings, parse_embeddings_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = parse_embeddings_bytes(data) {
        let text = t.to_text();
        assert_eq!(parse_embeddings(&text).unwrap().to_text(), text);
        let _ = t.lookup("qaaat");
    }
});
