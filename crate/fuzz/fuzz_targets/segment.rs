#![no_main]

use libfuzzer_sys::fuzz_target;
use codemix::normalize::{segment_spaceless, Lexicon};
use codemix::LangTag;

// First line lists the lexicon words, each further line is segmented.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut lines = text.lines();
    let words: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    let (Ok(en), Ok(ru)) = (Lexicon::from_words(LangTag::En, words.iter().step_by(2)), Lexicon::from_words(LangTag::Ru, words.iter().skip(1).step_by(2))) else {
        return;
    };
    for line in lines {
        if let Ok(tokens) = segment_spaceless(line, &en, &ru) {
            assert_eq!(tokens.iter().map(|t| t.as_str()).collect::<String>(), line);
        }
    }
});
