//! Replays the checked-in fuzz corpus through the same checks as the fuzz
//! targets. Seeds named `valid*` must parse.

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use codemix::annotate::{parse_review, parse_review_bytes};
use codemix::config::PipelineConfig;
use codemix::corpus::{format_corpus, parse_corpus, parse_corpus_bytes};
use codemix::crf::{parse_crf, parse_crf_bytes};
use codemix::embed::{parse_embeddings, parse_embeddings_bytes};
use codemix::eval::{parse_reports, parse_reports_bytes};
use codemix::hmm::{parse_hmm, parse_hmm_bytes};
use codemix::neural::{parse_neural, parse_neural_bytes};
use codemix::normalize::{collapse, parse_lexicon_bytes, segment_spaceless, Lexicon};
use codemix::{CorpusFormat, LangTag};

/// Runs one target on one input; returns whether the input was accepted.
fn check(target: &str, data: &[u8]) -> bool {
    match target {
        "corpus_conll" | "corpus_plain" => {
            let format = if target == "corpus_conll" { CorpusFormat::Conll } else { CorpusFormat::Plain };
            let Ok(c) = parse_corpus_bytes(data, format) else { return false };
            let text = format_corpus(&c, format).unwrap();
            assert_eq!(parse_corpus(&text, format).unwrap(), c);
            true
        }
        "lexicon" => {
            let Ok(lex) = parse_lexicon_bytes(data, LangTag::Ru) else { return false };
            assert!(lex.forms().all(|f| lex.contains_base(&collapse(f))));
            true
        }
        "review" => {
            let Ok(r) = parse_review_bytes(data) else { return false };
            let text = r.to_text();
            assert_eq!(parse_review(&text).unwrap().to_text(), text);
            true
        }
        "hmm_model" => {
            let Ok(m) = parse_hmm_bytes(data) else { return false };
            let text = m.to_text();
            assert_eq!(parse_hmm(&text).unwrap().to_text(), text);
            true
        }
        "crf_model" => {
            let Ok(m) = parse_crf_bytes(data) else { return false };
            let text = m.to_text();
            assert_eq!(parse_crf(&text).unwrap().to_text(), text);
            true
        }
        "embeddings" => {
            let Ok(t) = parse_embeddings_bytes(data) else { return false };
            let text = t.to_text();
            assert_eq!(parse_embeddings(&text).unwrap().to_text(), text);
            assert_eq!(t.lookup("qaaat").0.len(), t.dim());
            true
        }
        "neural_model" => {
            let Ok(m) = parse_neural_bytes(data) else { return false };
            let text = m.to_text();
            assert_eq!(parse_neural(&text).unwrap().to_text(), text);
            true
        }
        "reports" => {
            let Ok(reports) = parse_reports_bytes(data) else { return false };
            for (name, r) in &reports {
                assert_eq!(parse_reports(&r.to_kv(name)).unwrap().len(), 1);
            }
            true
        }
        "config" => std::str::from_utf8(data).is_ok_and(|t| PipelineConfig::parse(t).is_ok()),
        "segment" => {
            let Ok(text) = std::str::from_utf8(data) else { return false };
            let mut lines = text.lines();
            let words: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
            let (Ok(en), Ok(ru)) = (
                Lexicon::from_words(LangTag::En, words.iter().step_by(2)),
                Lexicon::from_words(LangTag::Ru, words.iter().skip(1).step_by(2)),
            ) else {
                return false;
            };
            let mut all = true;
            for line in lines {
                match segment_spaceless(line, &en, &ru) {
                    Ok(tokens) => assert_eq!(tokens.iter().map(|t| t.as_str()).collect::<String>(), line),
                    Err(_) => all = false,
                }
            }
            all
        }
        other => panic!("no check for fuzz target {other}"),
    }
}

#[test]
fn seeds_replay_cleanly() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz");
    let corpus = root.join("corpus");
    let mut targets = 0;
    for entry in fs::read_dir(root.join("fuzz_targets")).unwrap() {
        let path = entry.unwrap().path();
        let target = path.file_stem().unwrap().to_str().unwrap().to_string();
        targets += 1;
        let mut seeds = 0;
        for seed in fs::read_dir(corpus.join(&target)).unwrap() {
            let seed = seed.unwrap().path();
            let accepted = check(&target, &fs::read(&seed).unwrap());
            if seed.file_name().unwrap().to_str().unwrap().starts_with("valid") {
                assert!(accepted, "{} was rejected", seed.display());
            }
            seeds += 1;
        }
        assert!(seeds > 0, "no seeds for {target}");
    }
    assert_eq!(targets, 11);
}

#[test]
fn mutated_seeds_never_panic() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for dir in fs::read_dir(&corpus).unwrap() {
        let dir = dir.unwrap().path();
        let target = dir.file_name().unwrap().to_str().unwrap().to_string();
        for seed in fs::read_dir(&dir).unwrap() {
            let data = fs::read(seed.unwrap().path()).unwrap();
            for cut in (0..data.len()).step_by(7) {
                check(&target, &data[..cut]);
                let mut flipped = data.clone();
                flipped[cut] ^= 0x20;
                check(&target, &flipped);
            }
        }
    }
}

const TARGETS: [&str; 11] = [
    "corpus_conll",
    "corpus_plain",
    "lexicon",
    "review",
    "hmm_model",
    "crf_model",
    "embeddings",
    "neural_model",
    "reports",
    "config",
    "segment",
];

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(target in 0..TARGETS.len(), data in proptest::collection::vec(any::<u8>(), 0..256)) {
        check(TARGETS[target], &data);
    }

    #[test]
    fn arbitrary_text_never_panics(target in 0..TARGETS.len(), text in "[a-zA-Z0-9 \t\n.#?=:\\[\\]\"-]{0,200}") {
        check(TARGETS[target], text.as_bytes());
    }
}
