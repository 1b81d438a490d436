#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::normalize::parse_lexicon_bytes;
use codemix::LangTag;

fuzz_target!(|data: &[u8]| {
    if let Ok(lex) = parse_lexicon_bytes(data, LangTag::Ru) {
        for form in lex.forms() {
            assert!(lex.contains_base(&codemix::normalize::collapse(form)));
        }
    }
});
