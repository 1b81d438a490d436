//! Supervised first-order HMM tagger over the three language tags.
//!
//! Emissions are estimated over collapsed base forms, so lengthened
//! spellings share counts with their base word. Every table is add-k
//! smoothed; the emission tables reserve one slot of mass for unseen words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::chain::{ChainScores, Marginals, TagVec};
use crate::corpus::{decode_utf8, Corpus, LangTag, Sentence, NUM_TAGS};
use crate::error::{Error, ParseError, Result};
use crate::linalg::log_sum_exp;
use crate::normalize::collapse;

/// Raw maximum-likelihood tallies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HmmCounts {
    pub initial: [u64; NUM_TAGS],
    pub transition: [[u64; NUM_TAGS]; NUM_TAGS],
    pub emission: [BTreeMap<String, u64>; NUM_TAGS],
    pub vocab: BTreeSet<String>,
}

impl HmmCounts {
    pub fn from_corpus(corpus: &Corpus) -> Result<Self> {
        if !corpus.is_annotated() {
            return Err(Error::NotAnnotated);
        }
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut counts = HmmCounts::default();
        for s in corpus.sentences() {
            let tags = s.tags().ok_or(Error::NotAnnotated)?;
            counts.initial[tags[0].index()] += 1;
            for w in tags.windows(2) {
                counts.transition[w[0].index()][w[1].index()] += 1;
            }
            for (surface, tag) in s.surfaces().zip(tags) {
                let base = collapse(surface);
                *counts.emission[tag.index()].entry(base.clone()).or_default() += 1;
                counts.vocab.insert(base);
            }
        }
        Ok(counts)
    }

    pub fn to_model(&self, k: f64) -> Result<HmmModel> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "smoothing k must be positive, got {k}"
            )));
        }
        let smooth = |counts: &[u64; NUM_TAGS]| -> TagVec {
            let total = counts.iter().sum::<u64>() as f64 + k * NUM_TAGS as f64;
            std::array::from_fn(|j| ((counts[j] as f64 + k) / total).ln())
        };
        let initial = smooth(&self.initial);
        let transition = std::array::from_fn(|i| smooth(&self.transition[i]));

        // One extra slot for the open-vocabulary unseen class.
        let slots = self.vocab.len() as f64 + 1.0;
        let denom: TagVec = std::array::from_fn(|t| {
            self.emission[t].values().sum::<u64>() as f64 + k * slots
        });
        let unseen = std::array::from_fn(|t| (k / denom[t]).ln());
        let emission = self
            .vocab
            .iter()
            .map(|w| {
                let row = std::array::from_fn(|t| {
                    let c = self.emission[t].get(w).copied().unwrap_or(0) as f64;
                    ((c + k) / denom[t]).ln()
                });
                (w.clone(), row)
            })
            .collect();
        Ok(HmmModel {
            k,
            initial,
            transition,
            emission,
            unseen,
        })
    }
}

/// Smoothed HMM parameters in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    pub k: f64,
    pub initial: TagVec,
    /// `transition[prev][next]`
    pub transition: [TagVec; NUM_TAGS],
    /// Base form to per-tag emission log-probability.
    pub emission: BTreeMap<String, TagVec>,
    /// Per-tag log-probability of any word outside the vocabulary.
    pub unseen: TagVec,
}

pub fn train_hmm(train: &Corpus, k: f64) -> Result<HmmModel> {
    HmmCounts::from_corpus(train)?.to_model(k)
}

impl HmmModel {
    pub fn emission_log_probs(&self, surface: &str) -> TagVec {
        self.emission
            .get(&collapse(surface))
            .copied()
            .unwrap_or(self.unseen)
    }

    pub fn chain<'a>(&self, surfaces: impl IntoIterator<Item = &'a str>) -> ChainScores {
        ChainScores {
            start: self.initial,
            transition: self.transition,
            emission: surfaces
                .into_iter()
                .map(|s| self.emission_log_probs(s))
                .collect(),
        }
    }

    pub fn viterbi(&self, sentence: &Sentence) -> Vec<LangTag> {
        self.chain(sentence.surfaces()).viterbi().0
    }

    pub fn forward_backward(&self, sentence: &Sentence) -> Marginals {
        self.chain(sentence.surfaces()).marginals()
    }

    pub fn posterior_decode(&self, sentence: &Sentence) -> Vec<LangTag> {
        self.chain(sentence.surfaces()).posterior_decode()
    }

    /// Largest deviation from 1 over every distribution in the model.
    pub fn normalization_error(&self) -> f64 {
        let mut worst = (log_sum_exp(&self.initial).exp() - 1.0).abs();
        for row in &self.transition {
            worst = worst.max((log_sum_exp(row).exp() - 1.0).abs());
        }
        for t in 0..NUM_TAGS {
            let mut col: Vec<f64> = self.emission.values().map(|r| r[t]).collect();
            col.push(self.unseen[t]);
            worst = worst.max((log_sum_exp(&col).exp() - 1.0).abs());
        }
        worst
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("CMHMM 1\n");
        let row = |v: &TagVec| format!("{} {} {}", v[0], v[1], v[2]);
        writeln!(out, "k {}", self.k).unwrap();
        writeln!(out, "initial {}", row(&self.initial)).unwrap();
        for tag in LangTag::ALL {
            writeln!(out, "transition {tag} {}", row(&self.transition[tag.index()])).unwrap();
        }
        writeln!(out, "unseen {}", row(&self.unseen)).unwrap();
        writeln!(out, "vocab {}", self.emission.len()).unwrap();
        for (w, r) in &self.emission {
            writeln!(out, "{w} {}", row(r)).unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        parse_hmm_bytes(&bytes).map_err(|e| Error::parse_file(path, e))
    }
}

pub fn viterbi(model: &HmmModel, sentence: &Sentence) -> Vec<LangTag> {
    model.viterbi(sentence)
}

pub fn posterior_decode(model: &HmmModel, sentence: &Sentence) -> Vec<LangTag> {
    model.posterior_decode(sentence)
}

/// Line-oriented reader shared by the model file parsers.
pub(crate) struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    pub line: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
            line: 0,
        }
    }

    pub fn next_line(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(ParseError::new(self.line + 1, 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, 1, msg)
    }

    /// Next line split on whitespace, checking the leading keyword.
    pub fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, ParseError> {
        let line = self.next_line(key)?;
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some(k) if k == key => Ok(fields.collect()),
            _ => Err(self.err(format!("expected `{key}` line"))),
        }
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        for (i, l) in self.iter.by_ref() {
            if !l.trim().is_empty() {
                return Err(ParseError::new(i + 1, 1, "trailing content"));
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_f64(lines: &Lines<'_>, s: &str) -> Result<f64, ParseError> {
    let v: f64 = s
        .parse()
        .map_err(|_| lines.err(format!("invalid number {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(lines.err(format!("non-finite number {s:?}")))
    }
}

pub(crate) fn parse_usize(lines: &Lines<'_>, s: &str) -> Result<usize, ParseError> {
    s.parse()
        .map_err(|_| lines.err(format!("invalid count {s:?}")))
}

fn parse_tag_vec(lines: &Lines<'_>, fields: &[&str]) -> Result<TagVec, ParseError> {
    if fields.len() != NUM_TAGS {
        return Err(lines.err(format!("expected {NUM_TAGS} values, found {}", fields.len())));
    }
    Ok([
        parse_f64(lines, fields[0])?,
        parse_f64(lines, fields[1])?,
        parse_f64(lines, fields[2])?,
    ])
}

pub fn parse_hmm(text: &str) -> Result<HmmModel, ParseError> {
    let mut lines = Lines::new(text);
    if lines.next_line("header")?.trim_end() != "CMHMM 1" {
        return Err(lines.err("expected header `CMHMM 1`"));
    }
    let k_fields = lines.keyed("k")?;
    let k = match k_fields.as_slice() {
        [v] => parse_f64(&lines, v)?,
        _ => return Err(lines.err("expected `k <value>`")),
    };
    if k <= 0.0 {
        return Err(lines.err("smoothing k must be positive"));
    }
    let fields = lines.keyed("initial")?;
    let initial = parse_tag_vec(&lines, &fields)?;
    let mut transition = [[0.0; NUM_TAGS]; NUM_TAGS];
    for tag in LangTag::ALL {
        let fields = lines.keyed("transition")?;
        if fields.first() != Some(&tag.as_str()) {
            return Err(lines.err(format!("expected `transition {tag}`")));
        }
        transition[tag.index()] = parse_tag_vec(&lines, &fields[1..])?;
    }
    let fields = lines.keyed("unseen")?;
    let unseen = parse_tag_vec(&lines, &fields)?;
    let n = match lines.keyed("vocab")?.as_slice() {
        [v] => parse_usize(&lines, v)?,
        _ => return Err(lines.err("expected `vocab <count>`")),
    };
    let mut emission = BTreeMap::new();
    for _ in 0..n {
        let line = lines.next_line("vocabulary entry")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((word, values)) = fields.split_first() else {
            return Err(lines.err("empty vocabulary line"));
        };
        let row = parse_tag_vec(&lines, values)?;
        if emission.insert(word.to_string(), row).is_some() {
            return Err(lines.err(format!("duplicate vocabulary entry {word:?}")));
        }
    }
    lines.finish()?;
    let model = HmmModel {
        k,
        initial,
        transition,
        emission,
        unseen,
    };
    let err = model.normalization_error();
    if !(err <= 1e-6) {
        return Err(ParseError::new(1, 1, format!("distributions not normalized (off by {err:e})")));
    }
    Ok(model)
}

pub fn parse_hmm_bytes(bytes: &[u8]) -> Result<HmmModel, ParseError> {
    parse_hmm(decode_utf8(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, CorpusFormat};
    use LangTag::*;

    fn corpus(text: &str) -> Corpus {
        parse_corpus(text, CorpusFormat::Conll).unwrap()
    }

    const THREE: &str = "meh\tru\nschool\ten\njaa\tru\n!\trs\n\n\
                         you\ten\nschool\ten\n\n\
                         kiaaa\tru\nkia\tru\n?\trs\n";

    #[test]
    fn hand_tallied_counts() {
        let c = HmmCounts::from_corpus(&corpus(THREE)).unwrap();
        assert_eq!(c.initial, [1, 2, 0]);
        // ru->en, en->ru, ru->rs | en->en | ru->ru, ru->rs
        assert_eq!(c.transition, [[1, 1, 0], [1, 1, 2], [0, 0, 0]]);
        // "school" collapses to "schol"
        assert_eq!(c.emission[En.index()]["schol"], 2);
        assert_eq!(c.emission[Ru.index()]["kia"], 2);
        assert_eq!(c.emission[Rs.index()].len(), 2);
        let vocab: Vec<&str> = c.vocab.iter().map(String::as_str).collect();
        assert_eq!(vocab, ["!", "?", "ja", "kia", "meh", "schol", "you"]);
    }

    #[test]
    fn smoothed_tables_are_normalized() {
        let m = train_hmm(&corpus(THREE), 0.5).unwrap();
        assert!(m.normalization_error() < 1e-9);
        // by hand: P(en | en) = (1 + 0.5) / (2 + 1.5)
        assert!((m.transition[0][0].exp() - 1.5 / 3.5).abs() < 1e-12);
        // unseen mass for rs: 0.5 / (2 + 0.5 * 8)
        assert!((m.unseen[2].exp() - 0.5 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_k_gives_mle() {
        let m = train_hmm(&corpus("a\ten\nb\ten\n"), 1e-12).unwrap();
        assert!((m.transition[0][0].exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn training_errors() {
        assert!(matches!(train_hmm(&Corpus::empty(true), 1.0), Err(Error::EmptyCorpus)));
        assert!(train_hmm(&corpus(THREE), 0.0).is_err());
        assert!(train_hmm(&corpus(THREE), -1.0).is_err());
        let plain = parse_corpus("a\n", CorpusFormat::Plain).unwrap();
        assert!(matches!(train_hmm(&plain, 1.0), Err(Error::NotAnnotated)));
    }

    #[test]
    fn single_token_is_argmax_of_initial_plus_emission() {
        let m = train_hmm(&corpus(THREE), 0.1).unwrap();
        for w in ["school", "kia", "!", "zzz"] {
            let s = Sentence::from_text(w).unwrap();
            let e = m.emission_log_probs(w);
            let scores: TagVec = std::array::from_fn(|j| m.initial[j] + e[j]);
            let expect = LangTag::from_index(crate::linalg::argmax(&scores));
            assert_eq!(m.viterbi(&s), vec![expect]);
            assert_eq!(m.posterior_decode(&s), vec![expect]);
        }
    }

    #[test]
    fn punctuation_only_sentences_are_rest() {
        let m = train_hmm(
            &corpus("!\trs\nmeh\tru\n\n?\trs\n!\trs\nyou\ten\n!\trs\n\njaa\tru\n?\trs\n"),
            0.1,
        )
        .unwrap();
        let s = Sentence::from_text("! ? !").unwrap();
        assert_eq!(m.viterbi(&s), vec![Rs, Rs, Rs]);
    }

    #[test]
    fn lengthened_variants_share_emissions() {
        let m = train_hmm(&corpus(THREE), 0.1).unwrap();
        assert_eq!(m.emission_log_probs("schoooool"), m.emission_log_probs("school"));
    }

    #[test]
    fn model_file_round_trip() {
        let m = train_hmm(&corpus(THREE), 0.25).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("CMHMM 1\n"));
        assert_eq!(parse_hmm(&text).unwrap(), m);
    }

    #[test]
    fn model_file_rejects_garbage() {
        let m = train_hmm(&corpus(THREE), 0.25).unwrap();
        let text = m.to_text();
        assert!(parse_hmm("CMHMM 2\n").is_err());
        assert!(parse_hmm(&text.replace("vocab 7", "vocab 8")).is_err());
        assert!(parse_hmm(&text.replace("k 0.25", "k -1")).is_err());
        let broken = text.replacen("initial ", "initial 0 ", 1);
        assert!(parse_hmm(&broken).is_err());
        assert!(parse_hmm(&format!("{text}extra\n")).is_err());
    }
}
