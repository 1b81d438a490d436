//! The `codemix` command line.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! data errors. Results go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::annotate::annotate_corpus;
use crate::config::PipelineConfig;
use crate::corpus::{
    corpus_stats, format_corpus, read_corpus, split_corpus, write_corpus, Corpus, CorpusFormat,
    LangTag, Sentence,
};
use crate::crf::{fit_crf, CrfConfig, CrfModel, FeatureSet};
use crate::embed::{fit_skipgram, EmbeddingTable};
use crate::error::{Error, Result};
use crate::eval::{compare, evaluate_corpora, read_reports, render_comparison, valid_model_name};
use crate::hmm::{train_hmm, HmmModel};
use crate::neural::{fit_neural, Arch, CellKind, NeuralModel};
use crate::normalize::{collapse, dedup_sentences, load_lexicon, segment_spaceless};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "codemix", version, about = "Token-level language identification for code-switched English / Roman Urdu")]
struct Cli {
    /// Seed for every random choice (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus format of the main input; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Plain,
    Conll,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => CorpusFormat::Plain,
            FormatArg::Conll => CorpusFormat::Conll,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Hmm,
    Crf,
    Bilstm,
    Attn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CellArg {
    Tanh,
    Lstm,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop duplicate sentences and optionally collapse letter lengthening.
    Normalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Rewrite every token as its collapsed base form.
        #[arg(long)]
        collapse: bool,
    },
    /// Split spaceless text into lexicon words, one input line per sentence.
    Segment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        lexicons: LexiconArgs,
    },
    /// Tag a raw corpus from the lexicons, queueing undecided words for review.
    Annotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        lexicons: LexiconArgs,
        /// Review file read for decisions and rewritten with new queries.
        #[arg(long)]
        review: Option<PathBuf>,
        /// Words found in both lexicons: en, ru or unresolved.
        #[arg(long)]
        ambiguous: Option<String>,
    },
    /// Shuffle sentences into train / dev / test files.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        dev: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Fractions as train,dev,test.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        fractions: Option<Vec<f64>>,
    },
    /// Train skipgram subword embeddings.
    TrainEmbeddings {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        negative: Option<usize>,
    },
    /// Train a tagger on an annotated corpus.
    Train {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        hyper: TrainArgs,
    },
    /// Tag a plain corpus with a trained model and write CoNLL.
    Tag {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Embedding table of a neural model.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
    /// Score predictions against a gold corpus.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Model name used as the key prefix of the report.
        #[arg(long, default_value = "model")]
        name: String,
        /// Also write `model.metric value` lines here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print a comparison table of saved reports.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        decimals: usize,
    },
    /// Write a synthetic gold corpus, its raw text and both lexicons.
    Generate {
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long)]
        noisy: bool,
    },
}

#[derive(Debug, Args)]
struct LexiconArgs {
    #[arg(long)]
    en: Option<PathBuf>,
    #[arg(long)]
    ru: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Embedding table (neural models).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// HMM smoothing constant.
    #[arg(long)]
    k: Option<f64>,
    /// CRF L2 strength.
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    tag_dim: Option<usize>,
    #[arg(long)]
    clip: Option<f64>,
    #[arg(long, value_enum)]
    encoder: Option<CellArg>,
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Every path a command reads must exist before any work starts.
fn require(paths: &[&Path]) -> std::result::Result<(), Failure> {
    for p in paths {
        if !p.is_file() {
            return Err(usage(format!("input file not found: {}", p.display())));
        }
    }
    Ok(())
}

fn pick(flag: &Option<PathBuf>, config: &Option<PathBuf>, what: &str) -> std::result::Result<PathBuf, Failure> {
    flag.clone()
        .or_else(|| config.clone())
        .ok_or_else(|| usage(format!("missing {what}: pass the flag or set it under [paths] in the config")))
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn model_kind(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    Ok(String::from_utf8_lossy(first).trim_end().to_string())
}

fn execute(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => {
            require(&[p])?;
            PipelineConfig::load(p)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let format = |default: CorpusFormat| cli.format.map(CorpusFormat::from).unwrap_or(default);

    match cli.command {
        Command::Normalize { input, output, collapse: fold } => {
            require(&[&input])?;
            let fmt = format(CorpusFormat::Plain);
            let corpus = read_corpus(&input, fmt)?;
            let before = corpus.len();
            let mut corpus = dedup_sentences(&corpus);
            if fold {
                let sentences = corpus
                    .sentences()
                    .iter()
                    .map(|s| {
                        let text: Vec<String> = s.surfaces().map(collapse).collect();
                        Sentence::from_text(&text.join(" "))
                            .and_then(|plain| match s.tags() {
                                Some(t) => plain.with_tags(t.to_vec()),
                                None => Ok(plain),
                            })
                    })
                    .collect::<Result<Vec<_>>>()?;
                corpus = Corpus::new(sentences, corpus.is_annotated())?;
            }
            emit(out, &output, &format_corpus(&corpus, fmt)?)?;
            if output.is_some() {
                say(out, format!("normalized {before} sentences to {}", corpus.len()))?;
            }
        }
        Command::Segment { input, output, lexicons } => {
            let en = pick(&lexicons.en, &cfg.paths.en_lexicon, "English lexicon (--en)")?;
            let ru = pick(&lexicons.ru, &cfg.paths.ru_lexicon, "Roman Urdu lexicon (--ru)")?;
            require(&[&input, &en, &ru])?;
            let (en, ru) = (load_lexicon(&en, LangTag::En)?, load_lexicon(&ru, LangTag::Ru)?);
            let bytes = fs::read(&input).map_err(|e| Error::io(&input, e))?;
            let text = crate::corpus::decode_utf8(&bytes).map_err(|e| Error::parse_file(&input, e))?;
            let mut result = String::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let words: Vec<String> = line
                    .split_whitespace()
                    .map(|chunk| segment_spaceless(chunk, &en, &ru))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .map(|t| t.as_str().to_string())
                    .collect();
                result.push_str(&words.join(" "));
                result.push('\n');
            }
            emit(out, &output, &result)?;
        }
        Command::Annotate { input, output, lexicons, review, ambiguous } => {
            let en = pick(&lexicons.en, &cfg.paths.en_lexicon, "English lexicon (--en)")?;
            let ru = pick(&lexicons.ru, &cfg.paths.ru_lexicon, "Roman Urdu lexicon (--ru)")?;
            require(&[&input, &en, &ru])?;
            if let Some(a) = ambiguous {
                cfg.annotate.ambiguous = a;
            }
            if review.is_some() {
                cfg.paths.review_file = review;
            }
            let policy = cfg.annotation_policy()?;
            let corpus = read_corpus(&input, format(CorpusFormat::Plain))?;
            let (en, ru) = (load_lexicon(&en, LangTag::En)?, load_lexicon(&ru, LangTag::Ru)?);
            let outcome = annotate_corpus(&corpus, &en, &ru, &policy)?;
            emit(out, &output, &format_corpus(&outcome.corpus, CorpusFormat::Conll)?)?;
            if output.is_some() {
                say(
                    out,
                    format!(
                        "annotated {} of {} sentences; {} sentences pending, {} words queued for review",
                        outcome.corpus.len(),
                        corpus.len(),
                        outcome.pending.len(),
                        outcome.review.len()
                    ),
                )?;
            }
        }
        Command::Split { input, train, dev, test, fractions } => {
            require(&[&input])?;
            if let Some(f) = fractions {
                (cfg.split.train, cfg.split.dev, cfg.split.test) = (f[0], f[1], f[2]);
            }
            let spec = cfg.split_spec()?;
            let fmt = format(CorpusFormat::Conll);
            let corpus = read_corpus(&input, fmt)?;
            let (a, b, c) = split_corpus(&corpus, &spec)?;
            write_corpus(&a, &train, fmt)?;
            write_corpus(&b, &dev, fmt)?;
            write_corpus(&c, &test, fmt)?;
            say(out, format!("split {} sentences into {} / {} / {}", corpus.len(), a.len(), b.len(), c.len()))?;
        }
        Command::TrainEmbeddings { input, output, dim, window, epochs, learning_rate, negative } => {
            require(&[&input])?;
            let e = &mut cfg.embed;
            e.dim = dim.unwrap_or(e.dim);
            e.window = window.unwrap_or(e.window);
            e.epochs = epochs.unwrap_or(e.epochs);
            e.learning_rate = learning_rate.unwrap_or(e.learning_rate);
            e.negative_samples = negative.unwrap_or(e.negative_samples);
            let corpus = read_corpus(&input, format(CorpusFormat::Conll))?;
            let fit = fit_skipgram(&corpus, &cfg.embed_config())?;
            fit.table.save(&output)?;
            say(
                out,
                format!(
                    "trained {}-dim embeddings for {} words and {} n-grams; final loss {:.4}; wrote {}",
                    fit.table.dim(),
                    fit.table.vocab_size(),
                    fit.table.ngrams().len(),
                    fit.epoch_loss.last().copied().unwrap_or(0.0),
                    output.display()
                ),
            )?;
        }
        Command::Train { model, train, output, hyper } => {
            let h = hyper;
            cfg.hmm.k = h.k.unwrap_or(cfg.hmm.k);
            cfg.crf.l2 = h.l2.unwrap_or(cfg.crf.l2);
            let n = &mut cfg.neural;
            n.hidden = h.hidden.unwrap_or(n.hidden);
            n.tag_dim = h.tag_dim.unwrap_or(n.tag_dim);
            n.clip = h.clip.unwrap_or(n.clip);
            if let Some(c) = h.encoder {
                n.encoder = Some(match c {
                    CellArg::Tanh => CellKind::Tanh,
                    CellArg::Lstm => CellKind::Lstm,
                });
            }
            match model {
                ModelArg::Crf => {
                    cfg.crf.epochs = h.epochs.unwrap_or(cfg.crf.epochs);
                    cfg.crf.step = h.step.unwrap_or(cfg.crf.step);
                }
                ModelArg::Bilstm | ModelArg::Attn => {
                    cfg.neural.epochs = h.epochs.unwrap_or(cfg.neural.epochs);
                    cfg.neural.step = h.step.unwrap_or(cfg.neural.step);
                }
                ModelArg::Hmm => {}
            }
            cfg.validate()?;
            let embeddings = match model {
                ModelArg::Bilstm | ModelArg::Attn => {
                    Some(pick(&h.embeddings, &cfg.paths.embeddings, "embedding table (--embeddings)")?)
                }
                _ => None,
            };
            let mut inputs = vec![train.as_path()];
            inputs.extend(embeddings.as_deref());
            require(&inputs)?;

            let corpus = read_corpus(&train, format(CorpusFormat::Conll))?;
            let stats = corpus_stats(&corpus)?;
            let summary = match model {
                ModelArg::Hmm => {
                    let m = train_hmm(&corpus, cfg.hmm.k)?;
                    m.save(&output)?;
                    format!("hmm: {} word types, k {}", m.emission.len(), m.k)
                }
                ModelArg::Crf => {
                    let crf_cfg = CrfConfig::from(&cfg.crf);
                    let fit = fit_crf(&corpus, FeatureSet::from_corpus(&corpus), &crf_cfg)?;
                    fit.model.save(&output)?;
                    format!(
                        "crf: {} attributes, objective {:.4} after {} epochs",
                        fit.model.features.len(),
                        fit.objective.last().copied().unwrap_or(0.0),
                        fit.objective.len() - 1
                    )
                }
                ModelArg::Bilstm | ModelArg::Attn => {
                    let arch = if matches!(model, ModelArg::Bilstm) { Arch::Bilstm } else { Arch::Attn };
                    let table = EmbeddingTable::load(embeddings.as_ref().expect("checked above"))?;
                    let fit = fit_neural(&corpus, &table, arch, &cfg.neural_config())?;
                    fit.model.save(&output)?;
                    format!(
                        "{arch}: {} parameters, loss {:.4} after {} epochs",
                        fit.model.parameter_count(),
                        fit.epoch_loss.last().copied().unwrap_or(0.0),
                        fit.epoch_loss.len()
                    )
                }
            };
            say(
                out,
                format!(
                    "{summary}; trained on {} sentences ({} tokens); wrote {}",
                    stats.sentences,
                    stats.tokens,
                    output.display()
                ),
            )?;
        }
        Command::Tag { model, input, output, embeddings } => {
            require(&[&model, &input])?;
            let kind = model_kind(&model)?;
            let corpus = read_corpus(&input, format(CorpusFormat::Plain))?.without_tags();
            let tagger: Box<dyn Fn(&Sentence) -> Result<Vec<LangTag>>> = if kind == "CMHMM 1" {
                let m = HmmModel::load(&model)?;
                Box::new(move |s| Ok(m.viterbi(s)))
            } else if kind == "CMCRF 1" {
                let m = CrfModel::load(&model)?;
                Box::new(move |s| Ok(m.decode(s)))
            } else if kind.starts_with("CMNN 1") {
                let emb = pick(&embeddings, &cfg.paths.embeddings, "embedding table (--embeddings)")?;
                require(&[&emb])?;
                let table = EmbeddingTable::load(&emb)?;
                let m = NeuralModel::load(&model, &table)?;
                Box::new(move |s| m.tag(s, &table))
            } else {
                return Err(Failure {
                    code: 2,
                    message: format!("{}: not a model file", model.display()),
                });
            };
            let tagged = corpus
                .sentences()
                .iter()
                .map(|s| s.with_tags(tagger(s)?))
                .collect::<Result<Vec<_>>>()?;
            let tagged = Corpus::new(tagged, true)?;
            emit(out, &output, &format_corpus(&tagged, CorpusFormat::Conll)?)?;
        }
        Command::Eval { gold, pred, name, report } => {
            require(&[&gold, &pred])?;
            if !valid_model_name(&name) {
                return Err(usage(format!("invalid model name {name:?}: no dots or spaces")));
            }
            let fmt = format(CorpusFormat::Conll);
            let g = read_corpus(&gold, fmt)?;
            let p = read_corpus(&pred, fmt)?;
            let r = evaluate_corpora(&g, &p)?;
            if let Some(path) = &report {
                r.save_kv(&name, path)?;
            }
            emit(out, &None, &r.to_text())?;
        }
        Command::Compare { reports, decimals } => {
            let refs: Vec<&Path> = reports.iter().map(PathBuf::as_path).collect();
            require(&refs)?;
            let mut all = Vec::new();
            for p in &reports {
                all.extend(read_reports(p)?);
            }
            emit(out, &None, &render_comparison(&compare(&all)?, decimals))?;
        }
        Command::Generate { output_dir, noisy } => {
            let synth = if noisy { SynthConfig::noisy(cfg.seed) } else { SynthConfig::clean(cfg.seed) };
            let data = generate(&synth)?;
            fs::create_dir_all(&output_dir).map_err(|e| Error::io(&output_dir, e))?;
            for (name, text) in [
                ("gold.conll", data.gold_text()),
                ("raw.txt", data.raw_text()),
                ("en.txt", data.lexicon_text(LangTag::En)),
                ("ru.txt", data.lexicon_text(LangTag::Ru)),
            ] {
                let p = output_dir.join(name);
                fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
            }
            say(out, format!("wrote {} sentences to {}", data.gold.len(), output_dir.display()))?;
        }
    }
    Ok(())
}

