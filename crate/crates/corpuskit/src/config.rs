//! Declarative pipeline configuration (TOML).

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use corpuskit_core::dedup::{DedupConfig, KeeperRule};
use corpuskit_core::quality::langid::DEFAULT_THRESHOLD;
use corpuskit_core::quality::{HeuristicConfig, QualityBucket};
use corpuskit_core::scrub::{CodeMathConfig, CodeMathWeights};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Root seed; every stage seed is derived from it.
    #[serde(default)]
    pub seed: u64,
    pub io: IoConfig,
    #[serde(default)]
    pub reports: ReportConfig,
    #[serde(default)]
    pub stages: Vec<StageConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    pub input: PathBuf,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    /// Also write dropped documents (with their trails) to `dropped.jsonl`.
    #[serde(default = "yes")]
    pub write_dropped: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    /// Tab-separated tables.
    #[default]
    Tsv,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedPath {
    pub id: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub format: ReportFormat,
    /// Token-length histogram of the kept documents.
    pub histogram: bool,
    /// Tokenizer for the histogram; byte-level counting when absent.
    pub histogram_tokenizer: Option<PathBuf>,
    /// Fertility of the kept documents under each listed tokenizer.
    pub fertility_tokenizers: Vec<NamedPath>,
    /// Near-duplicate cluster listing.
    pub dedup_clusters: bool,
    /// Per-stage wall time, written to its own file.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityStage {
    pub model: PathBuf,
    pub retain: Vec<QualityBucket>,
}

impl Default for QualityStage {
    fn default() -> Self {
        QualityStage {
            model: PathBuf::new(),
            retain: vec![QualityBucket::High],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LangIdStage {
    pub profiles: PathBuf,
    #[serde(rename = "langid_threshold")]
    pub threshold: f64,
    /// Drop documents routed to the unknown bin instead of tagging them.
    pub drop_unknown: bool,
}

impl Default for LangIdStage {
    fn default() -> Self {
        LangIdStage {
            profiles: PathBuf::new(),
            threshold: DEFAULT_THRESHOLD,
            drop_unknown: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzyDedupStage {
    pub shingle_k: usize,
    pub num_hashes: usize,
    pub bands: usize,
    pub rows: usize,
    pub jaccard_threshold: f64,
    /// Derived from the root seed when absent.
    pub dedup_seed: Option<u64>,
    pub exact_verify: bool,
    pub keeper: KeeperRule,
    /// Deduplicate within each language tag separately.
    pub group_by_lang: bool,
}

impl Default for FuzzyDedupStage {
    fn default() -> Self {
        let d = DedupConfig::default();
        FuzzyDedupStage {
            shingle_k: d.shingle_k,
            num_hashes: d.num_hashes,
            bands: d.bands,
            rows: d.rows,
            jaccard_threshold: d.jaccard_threshold,
            dedup_seed: None,
            exact_verify: d.exact_verify,
            keeper: d.keeper,
            group_by_lang: false,
        }
    }
}

impl FuzzyDedupStage {
    pub fn dedup_config(&self, root_seed: u64) -> DedupConfig {
        DedupConfig {
            shingle_k: self.shingle_k,
            num_hashes: self.num_hashes,
            bands: self.bands,
            rows: self.rows,
            jaccard_threshold: self.jaccard_threshold,
            seed: self
                .dedup_seed
                .unwrap_or_else(|| corpuskit_core::rng::derive_seed(root_seed, "fuzzy_dedup")),
            exact_verify: self.exact_verify,
            keeper: self.keeper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PiiStage {
    /// Pattern file; the built-in patterns when absent.
    pub patterns: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeMathStage {
    pub codemath_weights: CodeMathWeights,
    pub codemath_threshold: f64,
    pub numeric_cap: f64,
    /// Optional binary classifier (class 1 = code/math).
    pub model: Option<PathBuf>,
}

impl Default for CodeMathStage {
    fn default() -> Self {
        let d = CodeMathConfig::default();
        CodeMathStage {
            codemath_weights: d.weights,
            codemath_threshold: d.threshold,
            numeric_cap: d.numeric_cap,
            model: None,
        }
    }
}

impl CodeMathStage {
    pub fn scoring(&self) -> CodeMathConfig {
        CodeMathConfig {
            weights: self.codemath_weights,
            threshold: self.codemath_threshold,
            numeric_cap: self.numeric_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageConfig {
    WordCount(HeuristicConfig),
    MeanWordLength(HeuristicConfig),
    Quality(QualityStage),
    Langid(LangIdStage),
    Unicode(NoParams),
    ExactDedup(NoParams),
    FuzzyDedup(FuzzyDedupStage),
    Pii(PiiStage),
    Codemath(CodeMathStage),
}

pub const STAGE_NAMES: [&str; 9] = [
    "word_count",
    "mean_word_length",
    "quality",
    "langid",
    "unicode",
    "exact_dedup",
    "fuzzy_dedup",
    "pii",
    "codemath",
];

impl StageConfig {
    pub fn name(&self) -> &'static str {
        match self {
            StageConfig::WordCount(_) => "word_count",
            StageConfig::MeanWordLength(_) => "mean_word_length",
            StageConfig::Quality(_) => "quality",
            StageConfig::Langid(_) => "langid",
            StageConfig::Unicode(_) => "unicode",
            StageConfig::ExactDedup(_) => "exact_dedup",
            StageConfig::FuzzyDedup(_) => "fuzzy_dedup",
            StageConfig::Pii(_) => "pii",
            StageConfig::Codemath(_) => "codemath",
        }
    }

    /// Checks parameters without touching any file.
    pub fn validate_params(&self, root_seed: u64) -> Result<()> {
        match self {
            StageConfig::WordCount(h) | StageConfig::MeanWordLength(h) => h.validate()?,
            StageConfig::Quality(q) => {
                ensure!(
                    !q.model.as_os_str().is_empty(),
                    "quality stage needs a model path"
                );
                ensure!(!q.retain.is_empty(), "quality stage retains no bucket");
            }
            StageConfig::Langid(l) => {
                ensure!(
                    !l.profiles.as_os_str().is_empty(),
                    "langid stage needs a profiles path"
                );
                ensure!(
                    (0.0..=1.0).contains(&l.threshold),
                    "langid_threshold must lie in [0, 1]"
                );
            }
            StageConfig::FuzzyDedup(f) => f.dedup_config(root_seed).validate()?,
            StageConfig::Codemath(c) => c.scoring().validate()?,
            StageConfig::Unicode(_) | StageConfig::ExactDedup(_) | StageConfig::Pii(_) => {}
        }
        Ok(())
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text)?;
        cfg.normalize();
        Ok(cfg)
    }

    /// Loads a config; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg =
            Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn normalize(&mut self) {
        for stage in &mut self.stages {
            if let StageConfig::Quality(q) = stage {
                q.retain.sort();
                q.retain.dedup();
            }
        }
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.io.input);
        fix(&mut self.io.output_dir);
        if let Some(p) = &mut self.reports.histogram_tokenizer {
            fix(p);
        }
        for t in &mut self.reports.fertility_tokenizers {
            fix(&mut t.path);
        }
        for stage in &mut self.stages {
            match stage {
                StageConfig::Quality(q) => fix(&mut q.model),
                StageConfig::Langid(l) => fix(&mut l.profiles),
                StageConfig::Pii(PiiStage { patterns: Some(p) }) => fix(p),
                StageConfig::Codemath(CodeMathStage { model: Some(p), .. }) => fix(p),
                _ => {}
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, stage) in self.stages.iter().enumerate() {
            stage
                .validate_params(self.seed)
                .with_context(|| format!("stage {} ({})", i + 1, stage.name()))?;
        }
        let mut ids: Vec<&str> = self
            .reports
            .fertility_tokenizers
            .iter()
            .map(|t| t.id.as_str())
            .collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            bail!("fertility tokenizer id {:?} listed twice", w[0]);
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the parsed config. The output
    /// directory is left out, so reruns into another directory compare equal.
    pub fn digest(&self) -> String {
        let mut cfg = self.clone();
        cfg.io.output_dir = PathBuf::new();
        let canonical = serde_json::to_vec(&cfg).expect("config serializes");
        hex(&Sha256::digest(canonical))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// The default stage order: heuristics, quality classifier, language
/// identification, unicode repair, exact then fuzzy dedup, PII, code/math.
pub fn default_stages(quality_model: PathBuf, profiles: PathBuf) -> Vec<StageConfig> {
    vec![
        StageConfig::WordCount(HeuristicConfig::default()),
        StageConfig::MeanWordLength(HeuristicConfig::default()),
        StageConfig::Quality(QualityStage {
            model: quality_model,
            ..Default::default()
        }),
        StageConfig::Langid(LangIdStage {
            profiles,
            ..Default::default()
        }),
        StageConfig::Unicode(NoParams {}),
        StageConfig::ExactDedup(NoParams {}),
        StageConfig::FuzzyDedup(FuzzyDedupStage::default()),
        StageConfig::Pii(PiiStage::default()),
        StageConfig::Codemath(CodeMathStage::default()),
    ]
}
