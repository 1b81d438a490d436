//! Character-lengthening reduction, lexicons, spaceless-sentence
//! segmentation and sentence deduplication.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use crate::corpus::{decode_utf8, Corpus, LangTag, Token};
use crate::error::{Error, ParseError, Result};

/// A surface with every run of a repeated code point reduced to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseForm(String);

impl BaseForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for BaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `"youuuu"` becomes `"you"`, `"kiaaa"` becomes `"kia"`.
pub fn collapse(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev = None;
    for c in word.chars() {
        if prev != Some(c) {
            out.push(c);
        }
        prev = Some(c);
    }
    out
}

pub fn collapse_lengthening(word: &Token) -> BaseForm {
    BaseForm(collapse(word.as_str()))
}

/// Dictionary of one lexical language keyed by base form. Each base form
/// remembers the raw surfaces that collapsed onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    language: LangTag,
    entries: BTreeSet<String>,
    variants: BTreeMap<String, BTreeSet<String>>,
}

impl Lexicon {
    pub fn new(language: LangTag) -> Result<Self> {
        if language == LangTag::Rs {
            return Err(Error::InvalidArgument(
                "lexicons exist only for en and ru".into(),
            ));
        }
        Ok(Lexicon {
            language,
            entries: BTreeSet::new(),
            variants: BTreeMap::new(),
        })
    }

    pub fn from_words<I, S>(language: LangTag, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::new(language)?;
        for w in words {
            lex.insert(w.as_ref());
        }
        Ok(lex)
    }

    pub fn insert(&mut self, surface: &str) {
        let base = collapse(surface);
        self.entries.insert(base.clone());
        self.variants
            .entry(base)
            .or_default()
            .insert(surface.to_string());
    }

    pub fn language(&self) -> LangTag {
        self.language
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    pub fn variants(&self, base: &str) -> Option<&BTreeSet<String>> {
        self.variants.get(base)
    }

    pub fn contains_base(&self, base: &str) -> bool {
        self.entries.contains(base)
    }

    /// Every string segmentation may match: base forms and raw surfaces.
    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .map(String::as_str)
            .chain(self.variants.values().flatten().map(String::as_str))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One word per line; blank lines and `#` comments are skipped.
pub fn parse_lexicon(text: &str, language: LangTag) -> Result<Lexicon> {
    let mut lex = Lexicon::new(language)?;
    for (i, line) in text.lines().enumerate() {
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        if let Some(pos) = word.chars().position(char::is_whitespace) {
            let lead = line.chars().take_while(|c| c.is_whitespace()).count();
            return Err(ParseError::new(i + 1, lead + pos + 1, "whitespace inside lexicon word").into());
        }
        lex.insert(word);
    }
    Ok(lex)
}

pub fn parse_lexicon_bytes(bytes: &[u8], language: LangTag) -> Result<Lexicon> {
    parse_lexicon(decode_utf8(bytes)?, language)
}

pub fn load_lexicon(path: impl AsRef<Path>, language: LangTag) -> Result<Lexicon> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon_bytes(&bytes, language).map_err(|e| match e {
        Error::Parse(p) => Error::parse_file(path, p),
        other => other,
    })
}

/// Greedy longest-match segmenter over the union of several lexicons.
#[derive(Debug, Clone)]
pub struct Segmenter {
    words: HashSet<String>,
    max_chars: usize,
}

impl Segmenter {
    pub fn new<'a>(lexicons: impl IntoIterator<Item = &'a Lexicon>) -> Self {
        let words: HashSet<String> = lexicons
            .into_iter()
            .flat_map(|lex| lex.forms().map(str::to_string))
            .collect();
        let max_chars = words.iter().map(|w| w.chars().count()).max().unwrap_or(0);
        Segmenter { words, max_chars }
    }

    /// Splits `text` left to right, taking at each position the longest
    /// prefix that is a known word; when none matches, one character is
    /// emitted on its own. Concatenating the output reproduces `text`.
    pub fn segment(&self, text: &str) -> Result<Vec<Token>> {
        if text.is_empty() {
            return Err(Error::InvalidArgument("cannot segment empty text".into()));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "segmentation input {text:?} contains whitespace"
            )));
        }
        let mut bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
        bounds.push(text.len());
        let n = bounds.len() - 1;

        let mut out = Vec::new();
        let mut start = 0;
        while start < n {
            let longest = (start + 1..=n.min(start + self.max_chars))
                .rev()
                .find(|&end| self.words.contains(&text[bounds[start]..bounds[end]]));
            let end = longest.unwrap_or(start + 1);
            out.push(Token::new(&text[bounds[start]..bounds[end]])?);
            start = end;
        }
        Ok(out)
    }
}

pub fn segment_spaceless(text: &str, en: &Lexicon, ru: &Lexicon) -> Result<Vec<Token>> {
    Segmenter::new([en, ru]).segment(text)
}

/// Keeps the first occurrence of every exact-duplicate sentence.
pub fn dedup_sentences(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::new();
    let kept = corpus
        .sentences()
        .iter()
        .filter(|s| seen.insert(*s))
        .cloned()
        .collect();
    Corpus::new(kept, corpus.is_annotated()).expect("subset of a homogeneous corpus")
}
