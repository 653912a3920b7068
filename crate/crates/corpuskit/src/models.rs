//! On-disk formats for tokenizers, linear classifiers, language profiles
//! and PII pattern sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use corpuskit_core::quality::{FeatureSpec, LangProfile, LinearModel};
use corpuskit_core::scrub::PiiCategory;
use corpuskit_core::tokenizer::{PretokConfig, TokenizerModel};

pub const TOKENIZER_MAGIC: &str = "corpuskit-tokenizer";
pub const TOKENIZER_VERSION: u32 = 1;

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Text serialization: header, pretokenizer flags, specials, seed alphabet,
/// merges in training order, then the full vocabulary for reference. All
/// strings are JSON-quoted, one per line.
pub fn tokenizer_to_string(model: &TokenizerModel) -> String {
    let mut out = String::new();
    let pretok = model.pretok();
    writeln!(out, "{TOKENIZER_MAGIC} {TOKENIZER_VERSION}").unwrap();
    writeln!(out, "vocab_limit {}", model.vocab_limit()).unwrap();
    writeln!(out, "split_digits {}", pretok.split_digits).unwrap();
    writeln!(out, "split_whitespace {}", pretok.split_whitespace).unwrap();
    writeln!(out, "specials {}", model.specials().len()).unwrap();
    for s in model.specials() {
        writeln!(out, "{}", quoted(s)).unwrap();
    }
    writeln!(out, "alphabet {}", model.alphabet().len()).unwrap();
    for c in model.alphabet() {
        writeln!(out, "{}", quoted(c.encode_utf8(&mut [0; 4]))).unwrap();
    }
    let merges = model.merge_strings();
    writeln!(out, "merges {}", merges.len()).unwrap();
    for (a, b) in &merges {
        writeln!(out, "{} {}", quoted(a), quoted(b)).unwrap();
    }
    writeln!(out, "vocab {}", model.vocab_len()).unwrap();
    for (id, tok) in model.vocab().iter().enumerate() {
        writeln!(out, "{id}\t{}", quoted(&tok.display())).unwrap();
    }
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.iter
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| anyhow!("unexpected end of file, expected {what}"))
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let (n, line) = self.next(key)?;
        let value = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| anyhow!("line {n}: expected {key:?}"))?;
        value
            .parse()
            .map_err(|e| anyhow!("line {n}: bad {key}: {e}"))
    }

    fn strings(&mut self, what: &str, expected: usize) -> Result<Vec<String>> {
        let (n, line) = self.next(what)?;
        let mut out = Vec::with_capacity(expected);
        for item in serde_json::Deserializer::from_str(line).into_iter::<String>() {
            out.push(item.with_context(|| format!("line {n}: bad {what}"))?);
        }
        ensure!(
            out.len() == expected,
            "line {n}: expected {expected} strings in {what}"
        );
        Ok(out)
    }
}

pub fn tokenizer_from_str(text: &str) -> Result<TokenizerModel> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
    };
    let (_, header) = lines.next("header")?;
    let version = header
        .strip_prefix(TOKENIZER_MAGIC)
        .and_then(|r| r.trim().parse::<u32>().ok())
        .ok_or_else(|| anyhow!("not a tokenizer file"))?;
    ensure!(
        version == TOKENIZER_VERSION,
        "unsupported tokenizer file version {version}"
    );
    let vocab_limit: usize = lines.keyed("vocab_limit")?;
    let pretok = PretokConfig {
        split_digits: lines.keyed("split_digits")?,
        split_whitespace: lines.keyed("split_whitespace")?,
    };
    let n: usize = lines.keyed("specials")?;
    let mut specials = Vec::with_capacity(n);
    for _ in 0..n {
        specials.extend(lines.strings("special", 1)?);
    }
    let n: usize = lines.keyed("alphabet")?;
    let mut alphabet = BTreeSet::new();
    for _ in 0..n {
        let s = lines.strings("alphabet entry", 1)?.remove(0);
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => {
                alphabet.insert(c);
            }
            _ => bail!("alphabet entry {s:?} is not a single scalar"),
        }
    }
    let n: usize = lines.keyed("merges")?;
    let mut merges = Vec::with_capacity(n);
    for _ in 0..n {
        let mut pair = lines.strings("merge", 2)?;
        let right = pair.pop().unwrap();
        merges.push((pair.pop().unwrap(), right));
    }
    let model = TokenizerModel::from_parts(&alphabet, &specials, pretok, vocab_limit, &merges)?;
    let n: usize = lines.keyed("vocab")?;
    ensure!(
        n == model.vocab_len(),
        "vocab section lists {n} tokens, model rebuilds {}",
        model.vocab_len()
    );
    for id in 0..n {
        let (ln, line) = lines.next("vocab entry")?;
        let (idx, tok) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("line {ln}: bad vocab entry"))?;
        let tok: String =
            serde_json::from_str(tok).with_context(|| format!("line {ln}: bad vocab entry"))?;
        ensure!(
            idx.parse::<usize>().ok() == Some(id) && model.vocab()[id].display() == tok,
            "line {ln}: vocab entry does not match the rebuilt model"
        );
    }
    Ok(model)
}

pub fn save_tokenizer(model: &TokenizerModel, path: &Path) -> Result<()> {
    fs::write(path, tokenizer_to_string(model))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn load_tokenizer(path: &Path) -> Result<TokenizerModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    tokenizer_from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub const LINEAR_MAGIC: &[u8; 4] = b"CKLM";
pub const LINEAR_VERSION: u32 = 1;

/// Binary layout, little-endian: magic, version, kind label (u32 length +
/// UTF-8), n-gram order, dimension, class count (u32 each), seed (u64),
/// weight count (u64), weights (f32 each).
pub fn linear_to_bytes(model: &LinearModel, kind: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + kind.len() + model.weights.len() * 4);
    out.extend_from_slice(LINEAR_MAGIC);
    out.extend_from_slice(&LINEAR_VERSION.to_le_bytes());
    out.extend_from_slice(&(kind.len() as u32).to_le_bytes());
    out.extend_from_slice(kind.as_bytes());
    out.extend_from_slice(&(model.spec.ngram as u32).to_le_bytes());
    out.extend_from_slice(&(model.spec.dim as u32).to_le_bytes());
    out.extend_from_slice(&(model.num_classes as u32).to_le_bytes());
    out.extend_from_slice(&model.seed.to_le_bytes());
    out.extend_from_slice(&(model.weights.len() as u64).to_le_bytes());
    for w in &model.weights {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        ensure!(self.0.len() >= n, "model file is truncated");
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decodes a model and checks that it was written as `kind`.
pub fn linear_from_bytes(bytes: &[u8], kind: &str) -> Result<LinearModel> {
    let mut c = Cursor(bytes);
    ensure!(c.take(4)? == LINEAR_MAGIC, "not a linear model file");
    let version = c.u32()?;
    ensure!(
        version == LINEAR_VERSION,
        "unsupported model file version {version}"
    );
    let len = c.u32()? as usize;
    let label = std::str::from_utf8(c.take(len)?).context("model kind is not UTF-8")?;
    ensure!(
        label == kind,
        "model file holds a {label:?} model, expected {kind:?}"
    );
    let spec = FeatureSpec {
        ngram: c.u32()? as usize,
        dim: c.u32()? as usize,
    };
    let num_classes = c.u32()? as usize;
    let seed = c.u64()?;
    let n = c.u64()? as usize;
    let raw = c.take(
        n.checked_mul(4)
            .ok_or_else(|| anyhow!("weight count overflows"))?,
    )?;
    ensure!(c.0.is_empty(), "trailing bytes after weights");
    let weights = raw
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let model = LinearModel {
        spec,
        num_classes,
        seed,
        weights,
    };
    model.validate()?;
    Ok(model)
}

pub fn save_linear(model: &LinearModel, kind: &str, path: &Path) -> Result<()> {
    fs::write(path, linear_to_bytes(model, kind))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn load_linear(path: &Path, kind: &str) -> Result<LinearModel> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    linear_from_bytes(&bytes, kind).with_context(|| format!("parsing {}", path.display()))
}

pub fn save_profiles(profiles: &[LangProfile], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(profiles)?;
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn load_profiles(path: &Path) -> Result<Vec<LangProfile>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let profiles: Vec<LangProfile> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    ensure!(
        !profiles.is_empty(),
        "{} holds no language profiles",
        path.display()
    );
    let order = profiles[0].order;
    ensure!(
        profiles.iter().all(|p| p.order == order),
        "profiles mix n-gram orders"
    );
    Ok(profiles)
}

/// PII pattern file: a TOML table mapping category names to pattern lists.
///
/// ```toml
/// EMAIL = ['[a-z]+@[a-z]+\.com']
/// PHONE = ['\+91-[0-9]{10}']
/// ```
pub fn parse_pii_patterns(text: &str) -> Result<Vec<(PiiCategory, Vec<String>)>> {
    let table: BTreeMap<String, Vec<String>> = toml::from_str(text)?;
    let mut out: Vec<(PiiCategory, Vec<String>)> = table
        .into_iter()
        .map(|(name, patterns)| Ok((name.parse::<PiiCategory>()?, patterns)))
        .collect::<Result<_>>()?;
    // Category order breaks ties between equal-length matches.
    out.sort_by_key(|(c, _)| PiiCategory::ALL.iter().position(|a| a == c));
    Ok(out)
}

pub fn load_pii_patterns(path: &Path) -> Result<Vec<(PiiCategory, Vec<String>)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pii_patterns(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The built-in pattern set in the pattern-file format, as a starting point
/// for local edits.
pub fn default_pii_pattern_file() -> String {
    let table: BTreeMap<&str, Vec<String>> = corpuskit_core::scrub::default_patterns()
        .into_iter()
        .map(|(c, p)| (c.as_str(), p))
        .collect();
    toml::to_string(&table).expect("pattern table serializes")
}
