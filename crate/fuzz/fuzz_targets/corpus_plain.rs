#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::corpus::{format_corpus, parse_corpus, parse_corpus_bytes};
use codemix::CorpusFormat;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = parse_corpus_bytes(data, CorpusFormat::Plain) {
        let text = format_corpus(&c, CorpusFormat::Plain).unwrap();
        assert_eq!(parse_corpus(&text, CorpusFormat::Plain).unwrap(), c);
    }
});
