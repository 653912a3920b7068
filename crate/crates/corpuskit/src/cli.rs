//! Command-line interface.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use corpuskit_core::histogram::LengthHistogram;
use corpuskit_core::mixture::{LangMap, OptimizerConfig};
use corpuskit_core::quality::langid::{
    train_langid, DEFAULT_ORDER, DEFAULT_PROFILE_SIZE, DEFAULT_THRESHOLD,
};
use corpuskit_core::quality::{
    train_quality_classifier, FeatureSpec, LinearModel, QualityBucket, TrainConfig,
};
use corpuskit_core::scrub::CodeMathConfig;
use corpuskit_core::sft::{InstructionPair, JudgeFormat, StubJudge};
use corpuskit_core::tokenizer::{
    collect_seed_alphabet, train_bpe, BpeConfig, PretokConfig, TokenizerModel,
};
use corpuskit_core::Document;
use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, ReportFormat};
use crate::io::read_corpus;
use crate::judge_client::{judge_concurrently, HttpJudge};
use crate::models::{
    default_pii_pattern_file, load_profiles, load_tokenizer, save_linear, save_profiles,
    save_tokenizer,
};
use crate::pipeline::{
    emit_outputs, kept_fertility, run_pipeline, write_stage_report, PipelineError, CODEMATH_KIND,
    QUALITY_KIND,
};
use crate::report;
use crate::sft::{sft_filter, PreFilters, SftConfig};

/// Exit status for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status for failures while processing data.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0:#}")]
    Config(anyhow::Error),
    #[error("{0:#}")]
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

trait Classify<T> {
    fn config_err(self) -> Result<T, CliError>;
    fn runtime_err(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config_err(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Config(e.into()))
    }
    fn runtime_err(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "corpuskit",
    version,
    about = "Multilingual corpus curation and tokenizer tooling"
)]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Configuration file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root seed, overriding the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyChoice {
    /// Five-rating judge format with the strict retention policy.
    Default,
    /// Four-dimension rubric, all minimums at 5.
    Rubric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JudgeChoice {
    /// Offline scripted judge.
    Stub,
    /// HTTP endpoint from the configuration.
    Endpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    /// Three buckets from meta label LOW, MEDIUM or HIGH.
    Quality,
    /// Binary, meta label `code`/`math` (class 1) or `prose` (class 0).
    Codemath,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the curation pipeline described by --config.
    Curate {
        #[command(flatten)]
        common: Common,
    },
    /// Train a byte-fallback BPE tokenizer.
    TrainTokenizer {
        #[command(flatten)]
        common: Common,
        /// Corpus files (JSON lines).
        #[arg(long = "input", required_unless_present = "config")]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        vocab_size: Option<usize>,
        #[arg(long)]
        max_merges: Option<usize>,
        /// Reserved special token (repeatable).
        #[arg(long = "special")]
        specials: Vec<String>,
    },
    /// Fertility of one or more tokenizers on a language-tagged corpus.
    Fertility {
        #[command(flatten)]
        common: Common,
        /// Tokenizer as ID=PATH (repeatable, column order).
        #[arg(long = "tokenizer", required = true)]
        tokenizers: Vec<String>,
        /// Language-tagged corpus file.
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Fertility-driven language mixture optimization.
    OptimizeMixture {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Filter instruction pairs with the language rule, code/math filter and a judge.
    SftFilter {
        #[command(flatten)]
        common: Common,
        /// Instruction pairs (JSON lines with id, prompt, completion).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "default")]
        policy: PolicyChoice,
        #[arg(long, value_enum, default_value = "stub")]
        judge: JudgeChoice,
    },
    /// Length histogram and fertility table for a corpus.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        corpus: PathBuf,
        /// Tokenizer for counting tokens; byte-level when absent.
        #[arg(long)]
        tokenizer: Option<PathBuf>,
        /// Also write the fertility table (needs language tags).
        #[arg(long)]
        fertility: bool,
    },
    /// Train the quality or code/math classifier from labeled documents.
    TrainClassifier {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        labeled: PathBuf,
        #[arg(long, value_enum)]
        kind: ClassifierKind,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
    },
    /// Build language-identification profiles from a language-tagged corpus.
    TrainLangid {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_PROFILE_SIZE)]
        top_k: usize,
    },
    /// Print the built-in PII pattern file.
    PiiPatterns,
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Curate { common } => curate(&common),
        Command::TrainTokenizer {
            common,
            inputs,
            vocab_size,
            max_merges,
            specials,
        } => train_tokenizer(&common, inputs, vocab_size, max_merges, specials),
        Command::Fertility {
            common,
            tokenizers,
            corpus,
        } => fertility(&common, &tokenizers, &corpus),
        Command::OptimizeMixture { common, iterations } => optimize_mixture(&common, iterations),
        Command::SftFilter {
            common,
            input,
            policy,
            judge,
        } => sft(&common, &input, policy, judge),
        Command::Report {
            common,
            corpus,
            tokenizer,
            fertility,
        } => corpus_report(&common, &corpus, tokenizer, fertility),
        Command::TrainClassifier {
            common,
            labeled,
            kind,
            epochs,
        } => train_classifier(&common, &labeled, kind, epochs),
        Command::TrainLangid {
            common,
            corpus,
            order,
            top_k,
        } => langid(&common, &corpus, order, top_k),
        Command::PiiPatterns => {
            print!("{}", default_pii_pattern_file());
            Ok(())
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned + Default>(
    path: Option<&Path>,
) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .config_err()?;
            toml::from_str(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .config_err()
        }
    }
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .runtime_err()
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .runtime_err()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Reads a corpus, failing on malformed lines.
fn read_strict(path: &Path) -> Result<Vec<Document>, CliError> {
    let (docs, errors) = read_corpus(path).runtime_err()?;
    if let Some(first) = errors.first() {
        return Err(CliError::Runtime(anyhow!(
            "{}: {} malformed line(s), first: {first}",
            path.display(),
            errors.len()
        )));
    }
    Ok(docs)
}

fn by_language(docs: Vec<Document>) -> Result<LangMap<Vec<String>>, CliError> {
    let mut map: LangMap<Vec<String>> = BTreeMap::new();
    for d in docs {
        let lang = d
            .lang
            .ok_or_else(|| CliError::Runtime(anyhow!("document {} has no lang", d.id)))?;
        map.entry(lang).or_default().push(d.text);
    }
    Ok(map)
}

fn curate(common: &Common) -> Result<(), CliError> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config(anyhow!("curate needs --config")))?;
    let mut cfg = PipelineConfig::load(path).config_err()?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.io.output_dir = out.clone();
    }
    if let Some(format) = common.format {
        cfg.reports.format = format;
    }
    match run_pipeline(&cfg) {
        Ok(out) => {
            if let Err(e) = out.report.check_invariants() {
                return Err(CliError::Runtime(anyhow!("report invariant violated: {e}")));
            }
            let written = emit_outputs(&out, &cfg).runtime_err()?;
            for p in written {
                log::info!("wrote {}", p.display());
            }
            eprintln!(
                "curate: {} in, {} kept, {} dropped",
                out.report.input_documents,
                out.report.output_documents,
                out.report.total_dropped()
            );
            Ok(())
        }
        Err(PipelineError::Config(e)) => Err(CliError::Config(e)),
        Err(PipelineError::Runtime { error, partial }) => {
            if let Some(report) = partial {
                if let Err(e) = write_stage_report(&report, &cfg.io.output_dir, cfg.reports.format)
                {
                    log::error!("could not write partial report: {e:#}");
                }
            }
            Err(CliError::Runtime(error))
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TokenizerFileConfig {
    inputs: Vec<PathBuf>,
    bpe: BpeConfig,
}

fn train_tokenizer(
    common: &Common,
    inputs: Vec<PathBuf>,
    vocab_size: Option<usize>,
    max_merges: Option<usize>,
    specials: Vec<String>,
) -> Result<(), CliError> {
    let mut cfg: TokenizerFileConfig = read_config(common.config.as_deref())?;
    cfg.inputs.extend(inputs);
    if let Some(v) = vocab_size {
        cfg.bpe.vocab_size = v;
    }
    if max_merges.is_some() {
        cfg.bpe.max_merges = max_merges;
    }
    cfg.bpe.specials.extend(specials);
    if cfg.inputs.is_empty() {
        return Err(CliError::Config(anyhow!("no input corpora")));
    }
    let mut texts = Vec::new();
    for path in &cfg.inputs {
        texts.extend(read_strict(path)?.into_iter().map(|d| d.text));
    }
    let alphabet = collect_seed_alphabet(texts.iter().map(String::as_str));
    let model = train_bpe(texts.iter().map(String::as_str), &alphabet, &cfg.bpe).config_err()?;
    let dir = out_dir(common);
    ensure_dir(&dir)?;
    let path = dir.join("tokenizer.txt");
    save_tokenizer(&model, &path).runtime_err()?;
    eprintln!(
        "train-tokenizer: {} tokens, {} merges -> {}",
        model.vocab_len(),
        model.merges().len(),
        path.display()
    );
    Ok(())
}

fn parse_named(spec: &str) -> Result<(String, PathBuf), CliError> {
    let (id, path) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(anyhow!("expected ID=PATH, got {spec:?}")))?;
    Ok((id.to_owned(), PathBuf::from(path)))
}

fn emit(common: &Common, name: &str, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_file(&dir.join(name), text)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ext(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Tsv => "tsv",
        ReportFormat::Records => "jsonl",
    }
}

fn fertility(common: &Common, tokenizers: &[String], corpus: &Path) -> Result<(), CliError> {
    let named: Vec<(String, PathBuf)> = tokenizers
        .iter()
        .map(|s| parse_named(s))
        .collect::<Result<_, _>>()?;
    let models: Vec<(String, TokenizerModel)> = named
        .into_iter()
        .map(|(id, p)| load_tokenizer(&p).map(|m| (id, m)))
        .collect::<Result<_>>()
        .config_err()?;
    let docs = read_strict(corpus)?;
    let corpus_id = corpus
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reports = Vec::new();
    for (id, model) in &models {
        let mut r =
            corpuskit_core::tokenizer::fertility(model, &docs, &corpus_id, id).runtime_err()?;
        r.corpus_id = corpus_id.clone();
        reports.push(r);
    }
    let format = common.format.unwrap_or_default();
    emit(
        common,
        &format!("fertility.{}", ext(format)),
        &report::fertility_table(&reports, format),
    )
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MixtureFileConfig {
    /// Language code to training corpus.
    corpora: BTreeMap<String, PathBuf>,
    /// Language code to held-out corpus.
    eval_corpora: BTreeMap<String, PathBuf>,
    optimizer: OptimizerConfig,
}

fn load_lang_files(
    files: &BTreeMap<String, PathBuf>,
    base: &Path,
) -> Result<LangMap<Vec<String>>, CliError> {
    let mut out = LangMap::new();
    for (lang, path) in files {
        let path = if path.is_relative() {
            base.join(path)
        } else {
            path.clone()
        };
        out.insert(
            lang.clone(),
            read_strict(&path)?.into_iter().map(|d| d.text).collect(),
        );
    }
    Ok(out)
}

fn optimize_mixture(common: &Common, iterations: Option<usize>) -> Result<(), CliError> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config(anyhow!("optimize-mixture needs --config")))?;
    let mut cfg: MixtureFileConfig = read_config(Some(path))?;
    if let Some(n) = iterations {
        cfg.optimizer.iterations = n;
    }
    if let Some(seed) = common.seed {
        cfg.optimizer.seed = seed;
    }
    if cfg.corpora.is_empty() {
        return Err(CliError::Config(anyhow!("no corpora configured")));
    }
    cfg.optimizer.validate(cfg.corpora.len()).config_err()?;
    let base = path.parent().unwrap_or(Path::new("."));
    let corpora = load_lang_files(&cfg.corpora, base)?;
    let eval = load_lang_files(&cfg.eval_corpora, base)?;
    let mut probe =
        corpuskit_core::mixture::BpeProbe::new(&corpora, &eval, &cfg.optimizer).config_err()?;
    let state = corpuskit_core::mixture::optimize(
        corpora.keys().map(String::as_str),
        &cfg.optimizer,
        &mut probe,
    )
    .runtime_err()?;
    let dir = out_dir(common);
    ensure_dir(&dir)?;
    write_file(
        &dir.join("trajectory.jsonl"),
        report::trajectory_records(&state.history),
    )?;
    let mut alloc = String::from("lang\tshare\tchars\n");
    for (lang, share) in &state.shares {
        alloc.push_str(&format!("{lang}\t{share:.6}\t{}\n", state.allocation[lang]));
    }
    write_file(&dir.join("allocation.tsv"), alloc)?;
    if let Some(model) = &probe.last_model {
        save_tokenizer(model, &dir.join("tokenizer.txt")).runtime_err()?;
    }
    eprintln!(
        "optimize-mixture: {} iterations -> {}",
        state.history.len(),
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct DroppedPair<'a> {
    pair: &'a InstructionPair,
    decision: &'a corpuskit_core::StageDecision,
}

fn sft(
    common: &Common,
    input: &Path,
    policy: PolicyChoice,
    judge: JudgeChoice,
) -> Result<(), CliError> {
    let mut cfg: SftConfig = read_config(common.config.as_deref())?;
    if policy == PolicyChoice::Rubric {
        cfg.judge.format = JudgeFormat::Rubric;
    }
    cfg.judge.validate().config_err()?;
    let pre = PreFilters {
        profiles: cfg
            .profiles
            .as_deref()
            .map(load_profiles)
            .transpose()
            .config_err()?,
        langid_threshold: cfg.langid_threshold.unwrap_or(DEFAULT_THRESHOLD),
        codemath: cfg
            .codemath_prefilter
            .unwrap_or(true)
            .then(|| (CodeMathConfig::default(), None)),
    };
    let stub_lines: Option<Vec<String>> = match (&judge, &cfg.stub_responses) {
        (JudgeChoice::Stub, Some(p)) => Some(
            fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .config_err()?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(str::to_owned)
                .collect(),
        ),
        _ => None,
    };
    if judge == JudgeChoice::Endpoint {
        cfg.endpoint.validate().config_err()?;
    }
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))
        .runtime_err()?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair: InstructionPair = serde_json::from_str(line)
            .with_context(|| format!("{}: line {}", input.display(), i + 1))
            .runtime_err()?;
        pairs.push(pair);
    }
    let judge_cfg = cfg.judge.clone();
    let out = sft_filter(pairs, &pre, |batch| match judge {
        JudgeChoice::Stub => {
            // A single scripted judge keeps the response order deterministic.
            let mut stub = match &stub_lines {
                Some(lines) => StubJudge::new(lines.clone()),
                None => StubJudge::always_pass(),
            };
            Ok(batch
                .iter()
                .map(|p| corpuskit_core::sft::judge_pair(&mut stub, p, &judge_cfg))
                .collect())
        }
        JudgeChoice::Endpoint => {
            judge_concurrently(batch, &judge_cfg, cfg.endpoint.max_in_flight, || {
                HttpJudge::new(&cfg.endpoint)
            })
        }
    })
    .runtime_err()?;
    let dir = out_dir(common);
    ensure_dir(&dir)?;
    let lines = |items: Vec<String>| items.into_iter().map(|l| l + "\n").collect::<String>();
    write_file(
        &dir.join("kept.jsonl"),
        lines(
            out.kept
                .iter()
                .map(|p| serde_json::to_string(p).unwrap())
                .collect(),
        ),
    )?;
    write_file(
        &dir.join("dropped.jsonl"),
        lines(
            out.dropped
                .iter()
                .map(|(pair, decision)| {
                    serde_json::to_string(&DroppedPair { pair, decision }).unwrap()
                })
                .collect(),
        ),
    )?;
    write_file(
        &dir.join("audit.jsonl"),
        lines(
            out.audit
                .iter()
                .map(|a| serde_json::to_string(a).unwrap())
                .collect(),
        ),
    )?;
    let mut summary = String::from("outcome\tcount\n");
    summary.push_str(&format!("kept\t{}\n", out.kept.len()));
    for (reason, n) in out.drop_summary() {
        summary.push_str(&format!("drop:{reason}\t{n}\n"));
    }
    write_file(&dir.join("sft_report.tsv"), summary)?;
    eprintln!(
        "sft-filter: {} kept, {} dropped",
        out.kept.len(),
        out.dropped.len()
    );
    Ok(())
}

fn corpus_report(
    common: &Common,
    corpus: &Path,
    tokenizer: Option<PathBuf>,
    with_fertility: bool,
) -> Result<(), CliError> {
    let model = match &tokenizer {
        Some(p) => load_tokenizer(p).config_err()?,
        None => TokenizerModel::byte_only(PretokConfig::default()),
    };
    let docs = read_strict(corpus)?;
    let format = common.format.unwrap_or_default();
    let h = LengthHistogram::from_token_counts(docs.iter().map(|d| model.encode(&d.text).len()));
    emit(
        common,
        &format!("histogram.{}", ext(format)),
        &report::histogram_report(&h, format),
    )?;
    if with_fertility {
        let id = tokenizer
            .as_deref()
            .and_then(Path::file_stem)
            .map_or_else(|| "bytes".to_owned(), |s| s.to_string_lossy().into_owned());
        let r = kept_fertility(&model, &docs, &id);
        emit(
            common,
            &format!("fertility.{}", ext(format)),
            &report::fertility_table(&[r], format),
        )?;
    }
    Ok(())
}

fn label_of(doc: &Document) -> Option<&str> {
    doc.meta.get("label").map(String::as_str)
}

fn train_classifier(
    common: &Common,
    labeled: &Path,
    kind: ClassifierKind,
    epochs: usize,
) -> Result<(), CliError> {
    let docs = read_strict(labeled)?;
    let seed = common.seed.unwrap_or(0);
    let cfg = TrainConfig {
        spec: FeatureSpec::default(),
        epochs,
        seed,
        ..Default::default()
    };
    let dir = out_dir(common);
    ensure_dir(&dir)?;
    match kind {
        ClassifierKind::Quality => {
            let mut examples = Vec::new();
            for d in &docs {
                let label = label_of(d).ok_or_else(|| {
                    CliError::Runtime(anyhow!("document {} has no meta.label", d.id))
                })?;
                let bucket: QualityBucket = label.parse().runtime_err()?;
                examples.push((d.text.as_str(), bucket));
            }
            let (model, report) = train_quality_classifier(&examples, &cfg).config_err()?;
            save_linear(&model.0, QUALITY_KIND, &dir.join("quality.bin")).runtime_err()?;
            eprintln!(
                "train-classifier: training accuracy {:.4}",
                report.training_accuracy
            );
        }
        ClassifierKind::Codemath => {
            let mut examples = Vec::new();
            for d in &docs {
                let class = match label_of(d) {
                    Some("code") | Some("math") | Some("1") => 1,
                    Some("prose") | Some("0") => 0,
                    other => {
                        return Err(CliError::Runtime(anyhow!(
                            "document {}: bad codemath label {other:?}",
                            d.id
                        )))
                    }
                };
                examples.push((d.text.as_str(), class));
            }
            let model = LinearModel::train(&examples, 2, &cfg).config_err()?;
            save_linear(&model, CODEMATH_KIND, &dir.join("codemath.bin")).runtime_err()?;
        }
    }
    Ok(())
}

fn langid(common: &Common, corpus: &Path, order: usize, top_k: usize) -> Result<(), CliError> {
    ensure_ok(order >= 1 && top_k >= 1, "order and top-k must be positive")?;
    let corpora = by_language(read_strict(corpus)?)?;
    let profiles = train_langid(&corpora, order, top_k).runtime_err()?;
    let dir = out_dir(common);
    ensure_dir(&dir)?;
    save_profiles(&profiles, &dir.join("profiles.json")).runtime_err()?;
    Ok(())
}

fn ensure_ok(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(anyhow!("{msg}")))
    }
}
