//! Corpus data model, the plain and CoNLL text formats, deterministic
//! splitting and per-tag statistics.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ParseError, Result};

/// Language label of a token. The derived order (EN < RU < RS) is the
/// confusion-matrix index order and the tie-breaking order of every decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LangTag {
    En,
    Ru,
    Rs,
}

pub const NUM_TAGS: usize = 3;

impl LangTag {
    pub const ALL: [LangTag; NUM_TAGS] = [LangTag::En, LangTag::Ru, LangTag::Rs];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> LangTag {
        Self::ALL[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LangTag::En => "en",
            LangTag::Ru => "ru",
            LangTag::Rs => "rs",
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LangTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(LangTag::En),
            "ru" => Ok(LangTag::Ru),
            "rs" => Ok(LangTag::Rs),
            other => Err(format!("unknown tag {other:?} (expected en, ru or rs)")),
        }
    }
}

/// A non-empty surface word without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(Error::InvalidArgument("empty token".into()));
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "token {surface:?} contains whitespace"
            )));
        }
        Ok(Token(surface))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: LangTag,
}

/// An ordered, non-empty run of tokens, optionally carrying one tag per token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
    tags: Option<Vec<LangTag>>,
}

impl Sentence {
    pub fn plain(tokens: Vec<Token>) -> Result<Self> {
        Self::from_parts(tokens, None)
    }

    pub fn tagged(tokens: Vec<TaggedToken>) -> Result<Self> {
        let (tokens, tags) = tokens.into_iter().map(|t| (t.token, t.tag)).unzip();
        Self::from_parts(tokens, Some(tags))
    }

    pub fn from_parts(tokens: Vec<Token>, tags: Option<Vec<LangTag>>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("sentence must hold at least one token".into()));
        }
        if let Some(tags) = &tags {
            if tags.len() != tokens.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} tokens but {} tags",
                    tokens.len(),
                    tags.len()
                )));
            }
        }
        Ok(Sentence { tokens, tags })
    }

    /// Convenience for tests and fixtures: whitespace-split `text`.
    pub fn from_text(text: &str) -> Result<Self> {
        let tokens = text
            .split_whitespace()
            .map(Token::new)
            .collect::<Result<Vec<_>>>()?;
        Self::plain(tokens)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tags(&self) -> Option<&[LangTag]> {
        self.tags.as_deref()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_annotated(&self) -> bool {
        self.tags.is_some()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::as_str)
    }

    pub fn tagged_tokens(&self) -> Option<Vec<TaggedToken>> {
        let tags = self.tags.as_ref()?;
        Some(
            self.tokens
                .iter()
                .zip(tags)
                .map(|(token, &tag)| TaggedToken {
                    token: token.clone(),
                    tag,
                })
                .collect(),
        )
    }

    pub fn without_tags(&self) -> Sentence {
        Sentence {
            tokens: self.tokens.clone(),
            tags: None,
        }
    }

    pub fn with_tags(&self, tags: Vec<LangTag>) -> Result<Sentence> {
        Sentence::from_parts(self.tokens.clone(), Some(tags))
    }
}

/// Ordered list of sentences; either every sentence is annotated or none is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    annotated: bool,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, annotated: bool) -> Result<Self> {
        if let Some(i) = sentences.iter().position(|s| s.is_annotated() != annotated) {
            return Err(Error::InvalidArgument(format!(
                "sentence {i} breaks corpus homogeneity (annotated = {annotated})"
            )));
        }
        Ok(Corpus {
            sentences,
            annotated,
        })
    }

    pub fn empty(annotated: bool) -> Self {
        Corpus {
            sentences: Vec::new(),
            annotated,
        }
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Sentence> {
        self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn is_annotated(&self) -> bool {
        self.annotated
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn without_tags(&self) -> Corpus {
        Corpus {
            sentences: self.sentences.iter().map(Sentence::without_tags).collect(),
            annotated: false,
        }
    }

    /// Tag sequences of an annotated corpus, one per sentence.
    pub fn tag_sequences(&self) -> Result<Vec<Vec<LangTag>>> {
        if !self.annotated {
            return Err(Error::NotAnnotated);
        }
        Ok(self
            .sentences
            .iter()
            .map(|s| s.tags().map(<[LangTag]>::to_vec).unwrap_or_default())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One sentence per line, whitespace-separated tokens.
    Plain,
    /// `surface<TAB>tag` per token, blank line between sentences.
    Conll,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(CorpusFormat::Plain),
            "conll" => Ok(CorpusFormat::Conll),
            other => Err(format!("unknown corpus format {other:?} (expected plain or conll)")),
        }
    }
}

/// Decodes raw bytes, rejecting invalid UTF-8 with the position of the
/// first bad byte.
pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = &bytes[..e.valid_up_to()];
        // The prefix is valid by construction.
        let valid = std::str::from_utf8(valid).unwrap_or_default();
        let line = valid.matches('\n').count() + 1;
        let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError::new(line, column, "invalid UTF-8")
    })
}

pub fn parse_corpus_bytes(bytes: &[u8], format: CorpusFormat) -> Result<Corpus, ParseError> {
    parse_corpus(decode_utf8(bytes)?, format)
}

/// Parses corpus text. A zero-length input is the empty corpus; input
/// holding only blank lines is rejected.
pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<Corpus, ParseError> {
    let annotated = format == CorpusFormat::Conll;
    if text.is_empty() {
        return Ok(Corpus::empty(annotated));
    }
    let sentences = match format {
        CorpusFormat::Plain => parse_plain(text)?,
        CorpusFormat::Conll => parse_conll(text)?,
    };
    if sentences.is_empty() {
        return Err(ParseError::new(1, 1, "file holds no sentences"));
    }
    Ok(Corpus {
        sentences,
        annotated,
    })
}

fn parse_plain(text: &str) -> Result<Vec<Sentence>, ParseError> {
    Ok(text
        .lines()
        .filter_map(|line| {
            let tokens: Vec<Token> = line
                .split_whitespace()
                .map(|s| Token(s.to_string()))
                .collect();
            (!tokens.is_empty()).then(|| Sentence { tokens, tags: None })
        })
        .collect())
}

fn parse_conll(text: &str) -> Result<Vec<Sentence>, ParseError> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    let flush = |tokens: &mut Vec<Token>, tags: &mut Vec<LangTag>, out: &mut Vec<Sentence>| {
        if !tokens.is_empty() {
            out.push(Sentence {
                tokens: std::mem::take(tokens),
                tags: Some(std::mem::take(tags)),
            });
        }
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            flush(&mut tokens, &mut tags, &mut sentences);
            continue;
        }
        let Some((surface, tag)) = line.split_once('\t') else {
            return Err(ParseError::new(
                lineno,
                line.chars().count() + 1,
                "expected `token<TAB>tag`",
            ));
        };
        if surface.is_empty() {
            return Err(ParseError::new(lineno, 1, "empty token"));
        }
        if let Some(pos) = surface.chars().position(char::is_whitespace) {
            return Err(ParseError::new(lineno, pos + 1, "whitespace inside token"));
        }
        let tag_col = surface.chars().count() + 2;
        if let Some(pos) = tag.find('\t') {
            return Err(ParseError::new(
                lineno,
                tag_col + tag[..pos].chars().count(),
                "unexpected extra field",
            ));
        }
        let tag: LangTag = tag
            .parse()
            .map_err(|msg: String| ParseError::new(lineno, tag_col, msg))?;
        tokens.push(Token(surface.to_string()));
        tags.push(tag);
    }
    flush(&mut tokens, &mut tags, &mut sentences);
    Ok(sentences)
}

pub fn read_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_corpus_bytes(&bytes, format).map_err(|e| Error::parse_file(path, e))
}

pub fn format_corpus(corpus: &Corpus, format: CorpusFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        CorpusFormat::Plain => {
            for s in &corpus.sentences {
                let line: Vec<&str> = s.surfaces().collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        CorpusFormat::Conll => {
            if !corpus.annotated {
                return Err(Error::NotAnnotated);
            }
            for s in &corpus.sentences {
                for (token, tag) in s.tokens.iter().zip(s.tags.iter().flatten()) {
                    out.push_str(token.as_str());
                    out.push('\t');
                    out.push_str(tag.as_str());
                    out.push('\n');
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    let text = format_corpus(corpus, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Fractions of sentences routed to train / dev / test, plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, dev: f64, test: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            train,
            dev,
            test,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("train", self.train), ("dev", self.dev), ("test", self.test)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidArgument(format!(
                    "{name} fraction {f} outside [0, 1]"
                )));
            }
        }
        let sum = self.train + self.dev + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "split fractions sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// Sentence counts per split, by largest remainder so every count is
    /// within one of its exact share and the counts sum to `n`.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let exact = [self.train, self.dev, self.test].map(|f| f * n as f64);
        let mut sizes = exact.map(|x| x.floor() as usize);
        let mut left = n.saturating_sub(sizes.iter().sum());
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            sizes[i] += 1;
            left -= 1;
        }
        sizes
    }
}

/// Shuffles sentence indices with the spec's seed and cuts the permutation
/// into train / dev / test. Sentences keep their original relative order
/// inside each part.
pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus, Corpus)> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);

    let [n_train, n_dev, _] = spec.sizes(n);
    let take = |ids: &[usize]| {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        Corpus {
            sentences: ids.iter().map(|&i| corpus.sentences[i].clone()).collect(),
            annotated: corpus.annotated,
        }
    };
    Ok((
        take(&order[..n_train]),
        take(&order[n_train..n_train + n_dev]),
        take(&order[n_train + n_dev..]),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub sentences: usize,
    pub tokens: usize,
    /// Indexed by [`LangTag::index`]; absent tags count zero.
    pub per_tag: [usize; NUM_TAGS],
}

impl CorpusStats {
    pub fn count(&self, tag: LangTag) -> usize {
        self.per_tag[tag.index()]
    }
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if !corpus.annotated {
        return Err(Error::NotAnnotated);
    }
    let mut stats = CorpusStats {
        sentences: corpus.len(),
        ..Default::default()
    };
    for s in &corpus.sentences {
        stats.tokens += s.len();
        for &tag in s.tags.iter().flatten() {
            stats.per_tag[tag.index()] += 1;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conll_single_sentence() {
        let c = parse_corpus("meh\tru\nschool\trs\n\n", CorpusFormat::Conll).unwrap();
        assert!(c.is_annotated());
        assert_eq!(c.len(), 1);
        assert_eq!(c.sentences()[0].len(), 2);
        assert_eq!(c.sentences()[0].tags().unwrap(), &[LangTag::Ru, LangTag::Rs]);
    }

    #[test]
    fn plain_line_is_whitespace_split() {
        let c = parse_corpus("jaa raha hu\n", CorpusFormat::Plain).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.sentences()[0].len(), 3);
        assert!(!c.is_annotated());
    }

    #[test]
    fn bad_tag_names_line_and_tag() {
        let err = parse_corpus("school\txx\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.column, 8);
        assert!(err.message.contains("\"xx\""), "{err}");
    }

    #[test]
    fn conll_errors() {
        let err = parse_corpus("a\ten\n\tru\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!((err.line, err.message.as_str()), (2, "empty token"));
        let err = parse_corpus("a\ten\nb\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_corpus("a\ten\textra\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!(err.column, 5);
        let err = parse_corpus("a b\ten\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!(err.column, 2);
    }

    #[test]
    fn blank_only_file_is_rejected() {
        assert!(parse_corpus("\n\n", CorpusFormat::Conll).is_err());
        assert!(parse_corpus("   \n", CorpusFormat::Plain).is_err());
    }

    #[test]
    fn invalid_utf8_reports_position() {
        let err = parse_corpus_bytes(b"ab\tru\n\xffx\ten\n", CorpusFormat::Conll).unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
    }

    #[test]
    fn final_newline_optional_on_read() {
        let a = parse_corpus("a\ten\nb\tru", CorpusFormat::Conll).unwrap();
        let b = parse_corpus("a\ten\nb\tru\n\n", CorpusFormat::Conll).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conll_on_plain_corpus_is_rejected() {
        let c = parse_corpus("a b\n", CorpusFormat::Plain).unwrap();
        assert!(matches!(
            format_corpus(&c, CorpusFormat::Conll),
            Err(Error::NotAnnotated)
        ));
    }

    #[test]
    fn empty_corpus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.conll");
        write_corpus(&Corpus::empty(true), &path, CorpusFormat::Conll).unwrap();
        assert_eq!(fs::read(&path).unwrap().len(), 0);
        let back = read_corpus(&path, CorpusFormat::Conll).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let text: String = (0..10).map(|i| format!("w{i}\n")).collect();
        let c = parse_corpus(&text, CorpusFormat::Plain).unwrap();
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 7).unwrap();
        let (a, b, t) = split_corpus(&c, &spec).unwrap();
        assert_eq!((a.len(), b.len(), t.len()), (8, 1, 1));
        assert_eq!(split_corpus(&c, &spec).unwrap(), (a, b, t));
    }

    #[test]
    fn split_fractions_must_sum_to_one() {
        assert!(SplitSpec::new(0.5, 0.5, 0.1, 0).is_err());
        let c = parse_corpus("a\n", CorpusFormat::Plain).unwrap();
        let bad = SplitSpec {
            train: 0.5,
            dev: 0.5,
            test: 0.1,
            seed: 0,
        };
        assert!(split_corpus(&c, &bad).is_err());
        assert!(matches!(
            split_corpus(&Corpus::empty(false), &SplitSpec::new(1.0, 0.0, 0.0, 0).unwrap()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn stats_count_every_tag() {
        let c = parse_corpus(
            "a\ten\nb\ten\nc\tru\n\nd\ten\ne\tru\nf\trs\n",
            CorpusFormat::Conll,
        )
        .unwrap();
        let s = corpus_stats(&c).unwrap();
        assert_eq!(s.per_tag, [3, 2, 1]);
        assert_eq!(s.sentences, 2);
        let c = parse_corpus("a\ten\n", CorpusFormat::Conll).unwrap();
        assert_eq!(corpus_stats(&c).unwrap().count(LangTag::Rs), 0);
        let plain = parse_corpus("a\n", CorpusFormat::Plain).unwrap();
        assert!(matches!(corpus_stats(&plain), Err(Error::NotAnnotated)));
    }

    fn arb_token() -> impl Strategy<Value = String> {
        "[a-zà-ÿ!?.@#0-9]{1,6}"
    }

    fn arb_corpus() -> impl Strategy<Value = Corpus> {
        let sentence = prop::collection::vec(
            (arb_token(), 0usize..3).prop_map(|(s, t)| TaggedToken {
                token: Token::new(s).unwrap(),
                tag: LangTag::from_index(t),
            }),
            1..8,
        )
        .prop_map(|tt| Sentence::tagged(tt).unwrap());
        prop::collection::vec(sentence, 0..12).prop_map(|s| Corpus::new(s, true).unwrap())
    }

    proptest! {
        #[test]
        fn write_read_identity(corpus in arb_corpus()) {
            let text = format_corpus(&corpus, CorpusFormat::Conll).unwrap();
            prop_assert_eq!(&parse_corpus(&text, CorpusFormat::Conll).unwrap(), &corpus);
            let plain = corpus.without_tags();
            let text = format_corpus(&plain, CorpusFormat::Plain).unwrap();
            prop_assert_eq!(parse_corpus(&text, CorpusFormat::Plain).unwrap(), plain);
        }

        #[test]
        fn split_is_a_partition(corpus in arb_corpus(), seed in any::<u64>(), a in 0u32..=10, b in 0u32..=10) {
            prop_assume!(!corpus.is_empty() && a + b <= 10);
            let spec = SplitSpec::new(a as f64 / 10.0, b as f64 / 10.0, (10 - a - b) as f64 / 10.0, seed).unwrap();
            let (tr, dv, te) = split_corpus(&corpus, &spec).unwrap();
            prop_assert_eq!(tr.len() + dv.len() + te.len(), corpus.len());
            let n = corpus.len() as f64;
            for (part, f) in [(&tr, spec.train), (&dv, spec.dev), (&te, spec.test)] {
                prop_assert!((part.len() as f64 - f * n).abs() <= 1.0);
            }
            // Every sentence lands exactly once: count multiplicities.
            let mut all: Vec<&Sentence> = tr.sentences().iter().chain(dv.sentences()).chain(te.sentences()).collect();
            let mut orig: Vec<&Sentence> = corpus.sentences().iter().collect();
            let key = |s: &&Sentence| format!("{s:?}");
            all.sort_by_key(key);
            orig.sort_by_key(key);
            prop_assert_eq!(all, orig);
        }

        #[test]
        fn stats_total_is_sum_of_lengths(corpus in arb_corpus()) {
            let s = corpus_stats(&corpus).unwrap();
            prop_assert_eq!(s.per_tag.iter().sum::<usize>(), corpus.token_count());
            prop_assert_eq!(s.tokens, corpus.sentences().iter().map(Sentence::len).sum::<usize>());
        }
    }
}
