//! Seeded generator for synthetic bilingual corpora.
//!
//! Two artificial vocabularies are built from consonant-vowel syllables
//! over disjoint consonant sets, so the languages have distinct character
//! signatures and no word contains a repeated character. Sentences follow
//! a two-state Markov chain over the languages, with punctuation, numbers
//! and mentions mixed in as `rs` tokens. The noisy variant shares part of
//! the vocabulary between the languages and injects letter lengthening.

use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{format_corpus, Corpus, CorpusFormat, LangTag, Sentence, TaggedToken, Token};
use crate::error::{Error, Result};

const EN_CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 't'];
const RU_CONSONANTS: &[char] = &['c', 'h', 'j', 'q', 'r', 's', 'v', 'w', 'x', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];
const PUNCT: &[&str] = &["!", "?", ".", ",", "...", ":)"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub sentences: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub en_vocab: usize,
    pub ru_vocab: usize,
    /// Fraction of the Roman Urdu vocabulary borrowed from English.
    pub shared_fraction: f64,
    /// Probability of switching language after each word.
    pub switch_rate: f64,
    /// Probability that a token is punctuation, a number or a mention.
    pub rest_rate: f64,
    /// Probability that a word gets one letter stretched.
    pub lengthening_rate: f64,
    /// Probability that a sentence repeats an earlier one.
    pub duplicate_rate: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// The bundled fixture corpus.
    pub fn clean(seed: u64) -> Self {
        SynthConfig {
            sentences: 200,
            min_len: 4,
            max_len: 12,
            en_vocab: 60,
            ru_vocab: 50,
            shared_fraction: 0.0,
            switch_rate: 0.25,
            rest_rate: 0.1,
            lengthening_rate: 0.05,
            duplicate_rate: 0.02,
            seed,
        }
    }

    pub fn noisy(seed: u64) -> Self {
        SynthConfig {
            sentences: 1000,
            en_vocab: 150,
            ru_vocab: 150,
            shared_fraction: 0.2,
            lengthening_rate: 0.2,
            ..Self::clean(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if self.sentences == 0 || self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::InvalidArgument(
                "need at least one sentence and 1 <= min_len <= max_len".into(),
            ));
        }
        if !(1..=10_000).contains(&self.en_vocab) || !(1..=10_000).contains(&self.ru_vocab) {
            return Err(Error::InvalidArgument("vocabulary sizes must lie in 1..=10000".into()));
        }
        if ![self.shared_fraction, self.switch_rate, self.rest_rate, self.lengthening_rate, self.duplicate_rate]
            .into_iter()
            .all(prob)
        {
            return Err(Error::InvalidArgument("rates must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Generated gold corpus with the vocabularies it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub gold: Corpus,
    pub en_words: Vec<String>,
    pub ru_words: Vec<String>,
}

impl SynthCorpus {
    pub fn gold_text(&self) -> String {
        format_corpus(&self.gold, CorpusFormat::Conll).expect("gold corpus is annotated")
    }

    /// Untagged text, one sentence per line.
    pub fn raw_text(&self) -> String {
        format_corpus(&self.gold, CorpusFormat::Plain).expect("plain output")
    }

    pub fn lexicon_text(&self, lang: LangTag) -> String {
        let words = match lang {
            LangTag::En => &self.en_words,
            _ => &self.ru_words,
        };
        let mut out = format!("# synthetic {lang} lexicon\n");
        for w in words {
            writeln!(out, "{w}").unwrap();
        }
        out
    }
}

fn make_vocab(rng: &mut ChaCha8Rng, consonants: &[char], n: usize) -> Vec<String> {
    let mut words: Vec<String> = Vec::with_capacity(n);
    while words.len() < n {
        let syllables = rng.gen_range(1..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(consonants[rng.gen_range(0..consonants.len())]);
            w.push(VOWELS[rng.gen_range(0..VOWELS.len())]);
        }
        if rng.gen_bool(0.3) {
            w.push(consonants[rng.gen_range(0..consonants.len())]);
        }
        if w.chars().count() >= 2 && !words.contains(&w) {
            words.push(w);
        }
    }
    words
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((0..n).map(|r| 1.0 / (r + 1) as f64)).expect("non-empty vocabulary")
}

fn lengthen(rng: &mut ChaCha8Rng, word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let vowels: Vec<usize> = (0..chars.len()).filter(|&i| VOWELS.contains(&chars[i])).collect();
    let at = if vowels.is_empty() {
        chars.len() - 1
    } else {
        vowels[rng.gen_range(0..vowels.len())]
    };
    let extra = rng.gen_range(1..=3);
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        out.push(c);
        if i == at {
            out.extend(std::iter::repeat(c).take(extra));
        }
    }
    out
}

fn rest_token(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..10) {
        0..=5 => PUNCT[rng.gen_range(0..PUNCT.len())].to_string(),
        6..=8 => rng.gen_range(1..1000).to_string(),
        _ => format!("@u{}", rng.gen_range(1..100)),
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let en_words = make_vocab(&mut rng, EN_CONSONANTS, cfg.en_vocab);
    let mut ru_words = make_vocab(&mut rng, RU_CONSONANTS, cfg.ru_vocab);
    // borrow English words into spread-out ranks of the Urdu vocabulary
    let shared = (cfg.shared_fraction * cfg.ru_vocab as f64).round() as usize;
    for k in 0..shared.min(cfg.en_vocab) {
        let slot = k * cfg.ru_vocab / shared.max(1);
        ru_words[slot] = en_words[k * cfg.en_vocab / shared.max(1)].clone();
    }
    let en_dist = zipf(en_words.len());
    let ru_dist = zipf(ru_words.len());

    let mut sentences: Vec<Sentence> = Vec::with_capacity(cfg.sentences);
    while sentences.len() < cfg.sentences {
        if !sentences.is_empty() && rng.gen_bool(cfg.duplicate_rate) {
            let i = rng.gen_range(0..sentences.len());
            sentences.push(sentences[i].clone());
            continue;
        }
        let len = rng.gen_range(cfg.min_len..=cfg.max_len);
        let mut lang = if rng.gen_bool(0.6) { LangTag::En } else { LangTag::Ru };
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            if rng.gen_bool(cfg.rest_rate) {
                tokens.push(TaggedToken {
                    token: Token::new(rest_token(&mut rng))?,
                    tag: LangTag::Rs,
                });
                continue;
            }
            let word = match lang {
                LangTag::En => &en_words[en_dist.sample(&mut rng)],
                _ => &ru_words[ru_dist.sample(&mut rng)],
            };
            let surface = if rng.gen_bool(cfg.lengthening_rate) {
                lengthen(&mut rng, word)
            } else {
                word.clone()
            };
            tokens.push(TaggedToken {
                token: Token::new(surface)?,
                tag: lang,
            });
            if rng.gen_bool(cfg.switch_rate) {
                lang = if lang == LangTag::En { LangTag::Ru } else { LangTag::En };
            }
        }
        sentences.push(Sentence::tagged(tokens)?);
    }
    Ok(SynthCorpus {
        gold: Corpus::new(sentences, true)?,
        en_words,
        ru_words,
    })
}
