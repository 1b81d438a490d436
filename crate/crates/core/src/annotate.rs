//! Lexicon-driven annotation of raw corpora into en / ru / rs, with a
//! file-mediated review loop for tokens the lexicons cannot decide.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{decode_utf8, Corpus, LangTag, Sentence, TaggedToken, Token};
use crate::error::{Error, ParseError, Result};
use crate::normalize::{collapse, Lexicon};

/// What to do with a word found in both lexicons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguousDefault {
    En,
    Ru,
    #[default]
    MarkUnresolved,
}

impl FromStr for AmbiguousDefault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(AmbiguousDefault::En),
            "ru" => Ok(AmbiguousDefault::Ru),
            "unresolved" => Ok(AmbiguousDefault::MarkUnresolved),
            other => Err(format!(
                "unknown ambiguity policy {other:?} (expected en, ru or unresolved)"
            )),
        }
    }
}

/// Token shapes sent straight to `rs`. Tokens without any alphabetic
/// character are always `rs`; these switches cover the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestRules {
    pub mentions: bool,
    pub hashtags: bool,
    pub urls: bool,
    /// Capitalized out-of-lexicon words as named entities. Noisy on chat text.
    pub capitalized: bool,
}

impl Default for RestRules {
    fn default() -> Self {
        RestRules {
            mentions: true,
            hashtags: true,
            urls: true,
            capitalized: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationPolicy {
    pub ambiguous_default: AmbiguousDefault,
    pub rest: RestRules,
    pub review_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnresolvedReason {
    /// Present in both lexicons.
    Ambiguous,
    /// Present in neither.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    Tagged(TaggedToken),
    Unresolved {
        token: Token,
        reason: UnresolvedReason,
    },
}

impl Annotation {
    pub fn token(&self) -> &Token {
        match self {
            Annotation::Tagged(t) => &t.token,
            Annotation::Unresolved { token, .. } => token,
        }
    }

    pub fn tag(&self) -> Option<LangTag> {
        match self {
            Annotation::Tagged(t) => Some(t.tag),
            Annotation::Unresolved { .. } => None,
        }
    }
}

pub fn is_rest_token(surface: &str, rules: &RestRules) -> bool {
    if !surface.chars().any(char::is_alphabetic) {
        return true;
    }
    let tail_nonempty = surface.chars().count() > 1;
    (rules.mentions && surface.starts_with('@') && tail_nonempty)
        || (rules.hashtags && surface.starts_with('#') && tail_nonempty)
        || (rules.urls
            && (surface.starts_with("http://")
                || surface.starts_with("https://")
                || surface.starts_with("www.")))
}

fn lookup(lex: &Lexicon, surface: &str) -> bool {
    lex.contains_base(&collapse(surface)) || lex.contains_base(&collapse(&surface.to_lowercase()))
}

pub fn annotate_token(
    token: &Token,
    en: &Lexicon,
    ru: &Lexicon,
    policy: &AnnotationPolicy,
) -> Annotation {
    let surface = token.as_str();
    let tagged = |tag| {
        Annotation::Tagged(TaggedToken {
            token: token.clone(),
            tag,
        })
    };
    let unresolved = |reason| Annotation::Unresolved {
        token: token.clone(),
        reason,
    };
    if is_rest_token(surface, &policy.rest) {
        return tagged(LangTag::Rs);
    }
    match (lookup(en, surface), lookup(ru, surface)) {
        (true, false) => tagged(LangTag::En),
        (false, true) => tagged(LangTag::Ru),
        (true, true) => match policy.ambiguous_default {
            AmbiguousDefault::En => tagged(LangTag::En),
            AmbiguousDefault::Ru => tagged(LangTag::Ru),
            AmbiguousDefault::MarkUnresolved => unresolved(UnresolvedReason::Ambiguous),
        },
        (false, false) => {
            if policy.rest.capitalized && surface.chars().next().is_some_and(char::is_uppercase) {
                tagged(LangTag::Rs)
            } else {
                unresolved(UnresolvedReason::Unknown)
            }
        }
    }
}

/// Contents of a review file: surfaces in file order, each with the human
/// decision or `None` while still marked `?`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReviewFile {
    entries: Vec<(String, Option<LangTag>)>,
}

impl ReviewFile {
    pub fn entries(&self) -> &[(String, Option<LangTag>)] {
        &self.entries
    }

    pub fn decision(&self, surface: &str) -> Option<LangTag> {
        self.entries
            .iter()
            .rev()
            .find(|(s, _)| s == surface)
            .and_then(|(_, d)| *d)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.iter().any(|(s, _)| s == surface)
    }

    pub fn push(&mut self, surface: impl Into<String>, decision: Option<LangTag>) {
        self.entries.push((surface.into(), decision));
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (surface, decision) in &self.entries {
            out.push_str(surface);
            out.push('\t');
            out.push_str(decision.map_or("?", LangTag::as_str));
            out.push('\n');
        }
        out
    }
}

/// `surface<TAB>?` or `surface<TAB>en|ru|rs` per line; blank lines skipped.
pub fn parse_review(text: &str) -> Result<ReviewFile, ParseError> {
    let mut review = ReviewFile::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some((surface, decision)) = line.split_once('\t') else {
            return Err(ParseError::new(
                lineno,
                line.chars().count() + 1,
                "expected `surface<TAB>decision`",
            ));
        };
        if surface.is_empty() {
            return Err(ParseError::new(lineno, 1, "empty surface"));
        }
        if let Some(pos) = surface.chars().position(char::is_whitespace) {
            return Err(ParseError::new(lineno, pos + 1, "whitespace inside surface"));
        }
        let col = surface.chars().count() + 2;
        let decision = match decision.trim() {
            "?" => None,
            d => Some(
                d.parse::<LangTag>()
                    .map_err(|msg| ParseError::new(lineno, col, msg))?,
            ),
        };
        review.push(surface, decision);
    }
    Ok(review)
}

pub fn parse_review_bytes(bytes: &[u8]) -> Result<ReviewFile, ParseError> {
    parse_review(decode_utf8(bytes)?)
}

pub fn read_review(path: impl AsRef<Path>) -> Result<ReviewFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_review_bytes(&bytes).map_err(|e| Error::parse_file(path, e))
}

/// A sentence holding at least one token that still needs a human decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingSentence {
    /// Position in the input corpus.
    pub index: usize,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationOutcome {
    /// Fully tagged sentences, in input order.
    pub corpus: Corpus,
    pub pending: Vec<PendingSentence>,
    /// Distinct unresolved surfaces in first-occurrence order.
    pub review: Vec<String>,
}

/// Annotates without touching the filesystem. Human decisions from
/// `decisions` settle tokens the lexicons leave unresolved.
pub fn annotate_with_review(
    corpus: &Corpus,
    en: &Lexicon,
    ru: &Lexicon,
    policy: &AnnotationPolicy,
    decisions: &ReviewFile,
) -> Result<AnnotationOutcome> {
    if corpus.is_annotated() {
        return Err(Error::AlreadyAnnotated);
    }
    let mut done = Vec::new();
    let mut pending = Vec::new();
    let mut review = Vec::new();
    let mut queued = HashSet::new();

    for (index, sentence) in corpus.sentences().iter().enumerate() {
        let annotations: Vec<Annotation> = sentence
            .tokens()
            .iter()
            .map(|token| match annotate_token(token, en, ru, policy) {
                Annotation::Unresolved { token, reason } => match decisions.decision(token.as_str()) {
                    Some(tag) => Annotation::Tagged(TaggedToken { token, tag }),
                    None => Annotation::Unresolved { token, reason },
                },
                tagged => tagged,
            })
            .collect();

        let tags: Option<Vec<LangTag>> = annotations.iter().map(Annotation::tag).collect();
        match tags {
            Some(tags) => done.push(sentence.with_tags(tags)?),
            None => {
                for a in &annotations {
                    if let Annotation::Unresolved { token, .. } = a {
                        if queued.insert(token.as_str().to_string()) {
                            review.push(token.as_str().to_string());
                        }
                    }
                }
                pending.push(PendingSentence { index, annotations });
            }
        }
    }
    Ok(AnnotationOutcome {
        corpus: Corpus::new(done, true)?,
        pending,
        review,
    })
}

/// Full annotation pass. When the policy names a review file, decisions
/// already recorded there are merged in, and the file is rewritten with
/// those decisions followed by any newly unresolved surfaces marked `?`.
pub fn annotate_corpus(
    corpus: &Corpus,
    en: &Lexicon,
    ru: &Lexicon,
    policy: &AnnotationPolicy,
) -> Result<AnnotationOutcome> {
    let mut decisions = match &policy.review_file {
        Some(path) if path.exists() => read_review(path)?,
        _ => ReviewFile::default(),
    };
    let outcome = annotate_with_review(corpus, en, ru, policy, &decisions)?;
    if let Some(path) = &policy.review_file {
        for surface in &outcome.review {
            if !decisions.contains(surface) {
                decisions.push(surface.clone(), None);
            }
        }
        fs::write(path, decisions.to_text()).map_err(|e| Error::io(path, e))?;
    }
    Ok(outcome)
}

/// Rebuilds a fully tagged sentence from annotations, if nothing is pending.
pub fn sentence_from_annotations(annotations: &[Annotation]) -> Option<Sentence> {
    let tokens = annotations
        .iter()
        .map(|a| match a {
            Annotation::Tagged(t) => Some(t.clone()),
            Annotation::Unresolved { .. } => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Sentence::tagged(tokens).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, CorpusFormat};

    fn lexicons() -> (Lexicon, Lexicon) {
        let en = Lexicon::from_words(LangTag::En, ["school", "loot", "you", "shampoo"]).unwrap();
        let ru = Lexicon::from_words(LangTag::Ru, ["meh", "school", "jaa", "raha", "hu", "kia", "loot"])
            .unwrap();
        (en, ru)
    }

    fn tok(s: &str) -> Token {
        Token::new(s).unwrap()
    }

    #[test]
    fn punctuation_is_rest() {
        let (en, ru) = lexicons();
        let p = AnnotationPolicy::default();
        assert_eq!(annotate_token(&tok("!"), &en, &ru, &p).tag(), Some(LangTag::Rs));
        assert_eq!(annotate_token(&tok("2021"), &en, &ru, &p).tag(), Some(LangTag::Rs));
        assert_eq!(annotate_token(&tok("@ali"), &en, &ru, &p).tag(), Some(LangTag::Rs));
        assert_eq!(annotate_token(&tok("#pak"), &en, &ru, &p).tag(), Some(LangTag::Rs));
        assert_eq!(
            annotate_token(&tok("https://x.org"), &en, &ru, &p).tag(),
            Some(LangTag::Rs)
        );
    }

    #[test]
    fn punctuation_wins_over_lexicon() {
        let en = Lexicon::from_words(LangTag::En, ["!"]).unwrap();
        let ru = Lexicon::from_words(LangTag::Ru, ["!"]).unwrap();
        let p = AnnotationPolicy::default();
        assert_eq!(annotate_token(&tok("!!"), &en, &ru, &p).tag(), Some(LangTag::Rs));
    }

    #[test]
    fn lengthened_word_found_by_base_form() {
        let (en, ru) = lexicons();
        let p = AnnotationPolicy::default();
        assert_eq!(annotate_token(&tok("kiaaa"), &en, &ru, &p).tag(), Some(LangTag::Ru));
        assert_eq!(annotate_token(&tok("Youuuu"), &en, &ru, &p).tag(), Some(LangTag::En));
    }

    #[test]
    fn common_words_follow_policy() {
        let (en, ru) = lexicons();
        let mut p = AnnotationPolicy::default();
        assert_eq!(
            annotate_token(&tok("loot"), &en, &ru, &p),
            Annotation::Unresolved {
                token: tok("loot"),
                reason: UnresolvedReason::Ambiguous
            }
        );
        p.ambiguous_default = AmbiguousDefault::Ru;
        assert_eq!(annotate_token(&tok("loot"), &en, &ru, &p).tag(), Some(LangTag::Ru));
        p.ambiguous_default = AmbiguousDefault::En;
        assert_eq!(annotate_token(&tok("loot"), &en, &ru, &p).tag(), Some(LangTag::En));
    }

    #[test]
    fn capitalization_heuristic_is_opt_in() {
        let (en, ru) = lexicons();
        let mut p = AnnotationPolicy::default();
        assert!(annotate_token(&tok("Lahore"), &en, &ru, &p).tag().is_none());
        p.rest.capitalized = true;
        assert_eq!(annotate_token(&tok("Lahore"), &en, &ru, &p).tag(), Some(LangTag::Rs));
    }

    #[test]
    fn table_sentence() {
        let (en, ru) = lexicons();
        let corpus = parse_corpus("meh school jaa raha hu !\n", CorpusFormat::Plain).unwrap();
        let p = AnnotationPolicy {
            ambiguous_default: AmbiguousDefault::Ru,
            ..Default::default()
        };
        let out = annotate_with_review(&corpus, &en, &ru, &p, &ReviewFile::default()).unwrap();
        use LangTag::*;
        assert_eq!(out.corpus.sentences()[0].tags().unwrap(), &[Ru, Ru, Ru, Ru, Ru, Rs]);

        let p = AnnotationPolicy::default();
        let out = annotate_with_review(&corpus, &en, &ru, &p, &ReviewFile::default()).unwrap();
        assert!(out.corpus.is_empty());
        assert_eq!(out.review, ["school"]);
        let tags: Vec<Option<LangTag>> = out.pending[0].annotations.iter().map(Annotation::tag).collect();
        assert_eq!(tags, [Some(Ru), None, Some(Ru), Some(Ru), Some(Ru), Some(Rs)]);
    }

    #[test]
    fn all_oov_sentence_goes_to_review() {
        let (en, ru) = lexicons();
        let corpus = parse_corpus("foo bar foo\n", CorpusFormat::Plain).unwrap();
        let out =
            annotate_with_review(&corpus, &en, &ru, &AnnotationPolicy::default(), &ReviewFile::default())
                .unwrap();
        assert_eq!(out.review, ["foo", "bar"]);
        assert_eq!(out.pending[0].annotations.len(), 3);
        assert!(out.pending[0].annotations.iter().all(|a| a.tag().is_none()));
    }

    #[test]
    fn annotated_input_is_rejected() {
        let (en, ru) = lexicons();
        let c = parse_corpus("a\ten\n", CorpusFormat::Conll).unwrap();
        assert!(matches!(
            annotate_corpus(&c, &en, &ru, &AnnotationPolicy::default()),
            Err(Error::AlreadyAnnotated)
        ));
    }

    #[test]
    fn review_cycle_merges_decisions() {
        let (en, ru) = lexicons();
        let dir = tempfile::tempdir().unwrap();
        let review_path = dir.path().join("review.tsv");
        let policy = AnnotationPolicy {
            review_file: Some(review_path.clone()),
            ..Default::default()
        };
        let corpus = parse_corpus("meh school !\nfoo you\nyou\n", CorpusFormat::Plain).unwrap();

        let first = annotate_corpus(&corpus, &en, &ru, &policy).unwrap();
        assert_eq!(first.corpus.len(), 1);
        assert_eq!(fs::read_to_string(&review_path).unwrap(), "school\t?\nfoo\t?\n");

        // An untouched review file changes nothing.
        let again = annotate_corpus(&corpus, &en, &ru, &policy).unwrap();
        assert_eq!(again, first);

        fs::write(&review_path, "school\tru\nfoo\ten\n").unwrap();
        let merged = annotate_corpus(&corpus, &en, &ru, &policy).unwrap();
        assert!(merged.pending.is_empty());
        assert_eq!(merged.corpus.len(), 3);
        use LangTag::*;
        assert_eq!(merged.corpus.sentences()[0].tags().unwrap(), &[Ru, Ru, Rs]);
        assert_eq!(merged.corpus.sentences()[1].tags().unwrap(), &[En, En]);
    }

    #[test]
    fn empty_review_file_is_identity() {
        let (en, ru) = lexicons();
        let corpus = parse_corpus("meh school !\nfoo\n", CorpusFormat::Plain).unwrap();
        let p = AnnotationPolicy::default();
        let base = annotate_with_review(&corpus, &en, &ru, &p, &ReviewFile::default()).unwrap();
        let empty = parse_review("").unwrap();
        assert_eq!(annotate_with_review(&corpus, &en, &ru, &p, &empty).unwrap(), base);
    }

    #[test]
    fn review_parse_errors() {
        assert!(parse_review("a\t?\nb\n").unwrap_err().line == 2);
        let err = parse_review("abc\txx\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert_eq!(parse_review("a\t?\nb\trs\n").unwrap().decision("b"), Some(LangTag::Rs));
    }

    #[test]
    fn every_token_accounted_once() {
        let (en, ru) = lexicons();
        let corpus =
            parse_corpus("meh school !\nfoo you\nyou hu\nbar bar\n", CorpusFormat::Plain).unwrap();
        let out =
            annotate_with_review(&corpus, &en, &ru, &AnnotationPolicy::default(), &ReviewFile::default())
                .unwrap();
        let pending_tokens: usize = out.pending.iter().map(|p| p.annotations.len()).sum();
        assert_eq!(out.corpus.token_count() + pending_tokens, corpus.token_count());
        assert!(out.pending.iter().all(|p| sentence_from_annotations(&p.annotations).is_none()));
        assert_eq!(out.pending.len(), 3);
    }
}
