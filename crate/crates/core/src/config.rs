//! Pipeline configuration file (TOML). Unknown keys are rejected and
//! every command-line flag overrides the matching key.
//!
//! ```toml
//! seed = 7
//!
//! [paths]
//! en_lexicon = "fixtures/en.txt"
//! ru_lexicon = "fixtures/ru.txt"
//!
//! [split]
//! train = 0.8
//! dev = 0.1
//! test = 0.1
//!
//! [crf]
//! l2 = 0.01
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::annotate::{AmbiguousDefault, AnnotationPolicy, RestRules};
use crate::corpus::SplitSpec;
use crate::crf::CrfConfig;
use crate::embed::EmbedConfig;
use crate::error::{Error, Result};
use crate::neural::NeuralConfig;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub en_lexicon: Option<PathBuf>,
    pub ru_lexicon: Option<PathBuf>,
    pub review_file: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train: 0.8,
            dev: 0.1,
            test: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnotateConfig {
    /// `en`, `ru` or `unresolved`.
    pub ambiguous: String,
    pub mentions: bool,
    pub hashtags: bool,
    pub urls: bool,
    pub capitalized: bool,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        let rest = RestRules::default();
        AnnotateConfig {
            ambiguous: "unresolved".into(),
            mentions: rest.mentions,
            hashtags: rest.hashtags,
            urls: rest.urls,
            capitalized: rest.capitalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HmmConfig {
    pub k: f64,
}

impl Default for HmmConfig {
    fn default() -> Self {
        HmmConfig { k: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrfSection {
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl Default for CrfSection {
    fn default() -> Self {
        let d = CrfConfig::default();
        CrfSection {
            l2: d.l2,
            epochs: d.epochs,
            step: d.step,
        }
    }
}

impl From<&CrfSection> for CrfConfig {
    fn from(c: &CrfSection) -> Self {
        CrfConfig {
            l2: c.l2,
            epochs: c.epochs,
            step: c.step,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsConfig,
    pub split: SplitConfig,
    pub annotate: AnnotateConfig,
    pub embed: EmbedConfig,
    pub hmm: HmmConfig,
    pub crf: CrfSection,
    pub neural: NeuralConfig,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| {
            Error::InvalidArgument(format!("config: {}", e.message()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks values without touching the filesystem.
    pub fn validate(&self) -> Result<()> {
        self.split_spec()?;
        self.annotation_policy()?;
        self.embed.validate()?;
        self.neural.validate()?;
        if !(self.hmm.k > 0.0 && self.hmm.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("hmm.k must be positive, got {}", self.hmm.k)));
        }
        if !(self.crf.l2 >= 0.0 && self.crf.step > 0.0) {
            return Err(Error::InvalidArgument("crf.l2 must be >= 0 and crf.step > 0".into()));
        }
        Ok(())
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        SplitSpec::new(self.split.train, self.split.dev, self.split.test, self.seed)
    }

    pub fn annotation_policy(&self) -> Result<AnnotationPolicy> {
        let a = &self.annotate;
        let ambiguous_default: AmbiguousDefault = a
            .ambiguous
            .parse()
            .map_err(|m: String| Error::InvalidArgument(format!("annotate.ambiguous: {m}")))?;
        Ok(AnnotationPolicy {
            ambiguous_default,
            rest: RestRules {
                mentions: a.mentions,
                hashtags: a.hashtags,
                urls: a.urls,
                capitalized: a.capitalized,
            },
            review_file: self.paths.review_file.clone(),
        })
    }

    pub fn embed_config(&self) -> EmbedConfig {
        EmbedConfig {
            seed: self.seed,
            ..self.embed.clone()
        }
    }

    pub fn neural_config(&self) -> NeuralConfig {
        NeuralConfig {
            seed: self.seed,
            ..self.neural.clone()
        }
    }
}
