//! Token-level confusion-matrix metrics and model comparison tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::{decode_utf8, Corpus, LangTag, NUM_TAGS};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold count.
    pub support: u64,
    pub predicted: u64,
}

impl ClassMetrics {
    /// Neither in the gold tags nor in the predictions; all metrics are 0.
    pub fn absent(&self) -> bool {
        self.support == 0 && self.predicted == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `confusion[gold][predicted]`
    pub confusion: [[u64; NUM_TAGS]; NUM_TAGS],
    pub total: u64,
    pub accuracy: f64,
    pub per_class: [ClassMetrics; NUM_TAGS],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl EvalReport {
    pub fn from_confusion(confusion: [[u64; NUM_TAGS]; NUM_TAGS]) -> Self {
        let total: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..NUM_TAGS).map(|i| confusion[i][i]).sum();
        let per_class = std::array::from_fn(|k| {
            let support: u64 = confusion[k].iter().sum();
            let predicted: u64 = confusion.iter().map(|row| row[k]).sum();
            let precision = ratio(confusion[k][k], predicted);
            let recall = ratio(confusion[k][k], support);
            ClassMetrics {
                precision,
                recall,
                f1: f1(precision, recall),
                support,
                predicted,
            }
        });
        let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / NUM_TAGS as f64;
        let accuracy = ratio(correct, total);
        EvalReport {
            confusion,
            total,
            accuracy,
            macro_precision: mean(|c| c.precision),
            macro_recall: mean(|c| c.recall),
            macro_f1: mean(|c| c.f1),
            micro_precision: accuracy,
            micro_recall: accuracy,
            micro_f1: accuracy,
            per_class,
        }
    }

    pub fn class(&self, tag: LangTag) -> &ClassMetrics {
        &self.per_class[tag.index()]
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "tokens    {}", self.total).unwrap();
        writeln!(out, "accuracy  {:.4}", self.accuracy).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "gold\\pred {:>8} {:>8} {:>8}", "en", "ru", "rs").unwrap();
        for tag in LangTag::ALL {
            let row = &self.confusion[tag.index()];
            writeln!(out, "{:<9} {:>8} {:>8} {:>8}", tag.as_str(), row[0], row[1], row[2]).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "{:<9} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "f1", "support").unwrap();
        for tag in LangTag::ALL {
            let c = self.class(tag);
            let flag = if c.absent() { "  (absent)" } else { "" };
            writeln!(
                out,
                "{:<9} {:>9.4} {:>9.4} {:>9.4} {:>8}{flag}",
                tag.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.support
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:<9} {:>9.4} {:>9.4} {:>9.4}",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1
        )
        .unwrap();
        writeln!(
            out,
            "{:<9} {:>9.4} {:>9.4} {:>9.4}",
            "micro", self.micro_precision, self.micro_recall, self.micro_f1
        )
        .unwrap();
        out
    }

    /// Machine-readable `model.metric value` lines. Precision, recall and
    /// f1 without a suffix are macro averages.
    pub fn to_kv(&self, model: &str) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{model}.{k} {v}").unwrap();
        kv("tokens", self.total.to_string());
        kv("accuracy", self.accuracy.to_string());
        kv("precision", self.macro_precision.to_string());
        kv("recall", self.macro_recall.to_string());
        kv("f1", self.macro_f1.to_string());
        kv("micro_precision", self.micro_precision.to_string());
        kv("micro_recall", self.micro_recall.to_string());
        kv("micro_f1", self.micro_f1.to_string());
        for tag in LangTag::ALL {
            let c = self.class(tag);
            let t = tag.as_str();
            kv(&format!("precision.{t}"), c.precision.to_string());
            kv(&format!("recall.{t}"), c.recall.to_string());
            kv(&format!("f1.{t}"), c.f1.to_string());
            kv(&format!("support.{t}"), c.support.to_string());
            kv(&format!("absent.{t}"), u8::from(c.absent()).to_string());
        }
        for g in LangTag::ALL {
            for p in LangTag::ALL {
                kv(
                    &format!("confusion.{}.{}", g.as_str(), p.as_str()),
                    self.confusion[g.index()][p.index()].to_string(),
                );
            }
        }
        out
    }

    pub fn save_kv(&self, model: &str, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_kv(model)).map_err(|e| Error::io(path, e))
    }
}

/// Scores predicted tag sequences against an annotated corpus.
pub fn evaluate(gold: &Corpus, predicted: &[Vec<LangTag>]) -> Result<EvalReport> {
    let gold_tags = gold.tag_sequences()?;
    if gold_tags.len() != predicted.len() {
        return Err(Error::SentenceCountMismatch {
            gold: gold_tags.len(),
            predicted: predicted.len(),
        });
    }
    let mut confusion = [[0u64; NUM_TAGS]; NUM_TAGS];
    for (i, (g, p)) in gold_tags.iter().zip(predicted).enumerate() {
        if g.len() != p.len() {
            return Err(Error::LengthMismatch {
                sentence: i,
                gold: g.len(),
                predicted: p.len(),
            });
        }
        for (a, b) in g.iter().zip(p) {
            confusion[a.index()][b.index()] += 1;
        }
    }
    Ok(EvalReport::from_confusion(confusion))
}

/// Like [`evaluate`], taking the predictions as an annotated corpus.
pub fn evaluate_corpora(gold: &Corpus, predicted: &Corpus) -> Result<EvalReport> {
    evaluate(gold, &predicted.tag_sequences()?)
}

/// Model names must be usable as key prefixes.
pub fn valid_model_name(name: &str) -> bool {
    !name.is_empty() && !name.contains('.') && !name.chars().any(char::is_whitespace)
}

/// Parses the `model.metric value` lines of one or more reports, in order
/// of first appearance. Metrics are recomputed from the confusion counts
/// and must agree with the stored values.
pub fn parse_reports(text: &str) -> Result<Vec<(String, EvalReport)>, ParseError> {
    let mut models: Vec<(String, Vec<(String, String, usize)>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(' ')
            .ok_or_else(|| ParseError::new(n, 1, "expected `model.metric value`"))?;
        let (model, metric) = key
            .split_once('.')
            .ok_or_else(|| ParseError::new(n, 1, "key has no model prefix"))?;
        if !valid_model_name(model) {
            return Err(ParseError::new(n, 1, format!("invalid model name {model:?}")));
        }
        match models.iter_mut().find(|(m, _)| m == model) {
            Some((_, entries)) => entries.push((metric.to_string(), value.to_string(), n)),
            None => models.push((model.to_string(), vec![(metric.to_string(), value.to_string(), n)])),
        }
    }
    if models.is_empty() {
        return Err(ParseError::new(1, 1, "no report lines"));
    }
    models
        .into_iter()
        .map(|(model, entries)| {
            let mut confusion = [[None::<u64>; NUM_TAGS]; NUM_TAGS];
            for (metric, value, n) in &entries {
                if let Some(rest) = metric.strip_prefix("confusion.") {
                    let (g, p) = rest
                        .split_once('.')
                        .and_then(|(g, p)| Some((g.parse::<LangTag>().ok()?, p.parse::<LangTag>().ok()?)))
                        .ok_or_else(|| ParseError::new(*n, 1, format!("unknown key {metric:?}")))?;
                    let v = value
                        .parse()
                        .map_err(|_| ParseError::new(*n, 1, format!("invalid count {value:?}")))?;
                    if confusion[g.index()][p.index()].replace(v).is_some() {
                        return Err(ParseError::new(*n, 1, format!("duplicate key {metric:?}")));
                    }
                }
            }
            let mut counts = [[0u64; NUM_TAGS]; NUM_TAGS];
            for g in 0..NUM_TAGS {
                for p in 0..NUM_TAGS {
                    counts[g][p] = confusion[g][p].ok_or_else(|| {
                        ParseError::new(1, 1, format!("{model}: missing confusion.{}.{}", LangTag::from_index(g), LangTag::from_index(p)))
                    })?;
                }
            }
            let report = EvalReport::from_confusion(counts);
            let expected = report.to_kv(&model);
            let expected: Vec<(&str, &str)> = expected
                .lines()
                .filter_map(|l| l.split_once(' '))
                .map(|(k, v)| (&k[model.len() + 1..], v))
                .collect();
            let mut seen = std::collections::HashSet::new();
            for (metric, value, n) in &entries {
                if !seen.insert(metric.as_str()) {
                    if !metric.starts_with("confusion.") {
                        return Err(ParseError::new(*n, 1, format!("duplicate key {metric:?}")));
                    }
                    continue;
                }
                match expected.iter().find(|(k, _)| k == metric) {
                    None => return Err(ParseError::new(*n, 1, format!("unknown key {metric:?}"))),
                    Some((_, v)) if v != value => {
                        return Err(ParseError::new(
                            *n,
                            1,
                            format!("{model}.{metric} is {value} but the confusion counts give {v}"),
                        ))
                    }
                    Some(_) => {}
                }
            }
            Ok((model, report))
        })
        .collect()
}

pub fn parse_reports_bytes(bytes: &[u8]) -> Result<Vec<(String, EvalReport)>, ParseError> {
    parse_reports(decode_utf8(bytes)?)
}

pub fn read_reports(path: impl AsRef<Path>) -> Result<Vec<(String, EvalReport)>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_reports_bytes(&bytes).map_err(|e| Error::parse_file(path, e))
}

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Headline (macro) metrics of each report, in input order.
pub fn compare(reports: &[(String, EvalReport)]) -> Result<Vec<ComparisonRow>> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("compare needs at least one report".into()));
    }
    Ok(reports
        .iter()
        .map(|(model, r)| ComparisonRow {
            model: model.clone(),
            accuracy: r.accuracy,
            precision: r.macro_precision,
            recall: r.macro_recall,
            f1: r.macro_f1,
        })
        .collect())
}

/// Aligned table with columns Models, Accuracy, Precision, Recall, F1 Score.
pub fn render_comparison(rows: &[ComparisonRow], decimals: usize) -> String {
    let header = ["Models", "Accuracy", "Precision", "Recall", "F1 Score"];
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format!("{:.decimals$}", r.accuracy),
                format!("{:.decimals$}", r.precision),
                format!("{:.decimals$}", r.recall),
                format!("{:.decimals$}", r.f1),
            ]
        })
        .collect();
    let width: Vec<usize> = (0..5)
        .map(|c| {
            cells
                .iter()
                .map(|row| row[c].chars().count())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |row: &[&str]| -> String {
        let mut s = format!("{:<w$}", row[0], w = width[0]);
        for c in 1..5 {
            write!(s, "  {:>w$}", row[c], w = width[c]).unwrap();
        }
        s.push('\n');
        s
    };
    let mut out = line(&header);
    for row in &cells {
        out.push_str(&line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    out
}
