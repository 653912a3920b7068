//! Line-delimited JSON corpus files.
//!
//! Each line is one object with reserved keys `id`, `text`, `lang` and
//! `meta` (string to string). Any other key is carried through untouched.
//! The stage trail is stored as a JSON string under `meta["trail"]`.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use corpuskit_core::{Document, StageDecision};
use serde_json::value::RawValue;

pub const TRAIL_KEY: &str = "trail";
const RESERVED: [&str; 4] = ["id", "text", "lang", "meta"];

/// A line that could not be turned into a document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot open {}: {source}", path.display())]
    Open { path: PathBuf, source: io::Error },
    #[error("read failed after line {line}: {source}")]
    Read { line: usize, source: io::Error },
}

#[derive(Debug, thiserror::Error)]
#[error("write failed after {written} documents: {source}")]
pub struct WriteError {
    pub written: usize,
    pub source: io::Error,
}

pub enum Record {
    Doc(Document),
    Bad(LineError),
}

/// Streams records from any reader. Invalid UTF-8 is replaced with U+FFFD;
/// blank lines are skipped.
pub struct CorpusReader<R> {
    inner: R,
    line: usize,
    seen: HashSet<String>,
    buf: Vec<u8>,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(inner: R) -> Self {
        CorpusReader {
            inner,
            line: 0,
            seen: HashSet::new(),
            buf: Vec::new(),
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Record, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(source) => {
                    return Some(Err(CorpusError::Read {
                        line: self.line,
                        source,
                    }))
                }
            }
            self.line += 1;
            let text = String::from_utf8_lossy(&self.buf);
            let trimmed = text.trim();
            if trimmed.is_empty() {
                continue;
            }
            let record = match parse_record(trimmed) {
                Ok(doc) if !self.seen.insert(doc.id.clone()) => Record::Bad(LineError {
                    line: self.line,
                    message: format!("duplicate id {:?}", doc.id),
                }),
                Ok(doc) => Record::Doc(doc),
                Err(message) => Record::Bad(LineError {
                    line: self.line,
                    message,
                }),
            };
            return Some(Ok(record));
        }
    }
}

pub fn open_corpus(path: &Path) -> Result<CorpusReader<BufReader<File>>, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Open {
        path: path.to_owned(),
        source,
    })?;
    Ok(CorpusReader::new(BufReader::new(file)))
}

/// Reads a whole corpus, returning documents in file order and every
/// malformed line.
pub fn read_corpus(path: &Path) -> Result<(Vec<Document>, Vec<LineError>), CorpusError> {
    collect(open_corpus(path)?)
}

pub fn read_corpus_from(reader: impl Read) -> Result<(Vec<Document>, Vec<LineError>), CorpusError> {
    collect(CorpusReader::new(BufReader::new(reader)))
}

fn collect<R: BufRead>(
    reader: CorpusReader<R>,
) -> Result<(Vec<Document>, Vec<LineError>), CorpusError> {
    let mut docs = Vec::new();
    let mut errors = Vec::new();
    for record in reader {
        match record? {
            Record::Doc(d) => docs.push(d),
            Record::Bad(e) => errors.push(e),
        }
    }
    Ok((docs, errors))
}

fn field<'a, T: serde::Deserialize<'a>>(raw: &'a RawValue, key: &str) -> Result<T, String> {
    serde_json::from_str(raw.get()).map_err(|e| format!("field {key:?}: {e}"))
}

pub fn parse_record(line: &str) -> Result<Document, String> {
    let fields: BTreeMap<String, &RawValue> =
        serde_json::from_str(line).map_err(|e| format!("not a JSON object: {e}"))?;
    let id: String = match fields.get("id") {
        Some(raw) => field(raw, "id")?,
        None => return Err("missing field \"id\"".into()),
    };
    if id.is_empty() {
        return Err("empty id".into());
    }
    let text: String = match fields.get("text") {
        Some(raw) => field(raw, "text")?,
        None => return Err("missing field \"text\"".into()),
    };
    let mut doc = Document::new(id, text);
    if let Some(raw) = fields.get("lang") {
        doc.lang = field::<Option<String>>(raw, "lang")?;
    }
    if let Some(raw) = fields.get("meta") {
        doc.meta = field::<Option<BTreeMap<String, String>>>(raw, "meta")?.unwrap_or_default();
    }
    if let Some(trail) = doc.meta.get(TRAIL_KEY) {
        if let Ok(parsed) = serde_json::from_str::<Vec<StageDecision>>(trail) {
            doc.trail = parsed;
            doc.meta.remove(TRAIL_KEY);
        }
    }
    for (key, raw) in fields {
        if !RESERVED.contains(&key.as_str()) {
            doc.extra.insert(key, raw.get().to_owned());
        }
    }
    Ok(doc)
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// One JSON line, without the trailing newline. Keys are emitted in a fixed
/// order so equal documents give equal bytes.
pub fn format_record(doc: &Document) -> String {
    let mut out = String::with_capacity(doc.text.len() + 64);
    out.push_str("{\"id\":");
    out.push_str(&json_str(&doc.id));
    out.push_str(",\"text\":");
    out.push_str(&json_str(&doc.text));
    if let Some(lang) = &doc.lang {
        out.push_str(",\"lang\":");
        out.push_str(&json_str(lang));
    }
    let trail = (!doc.trail.is_empty())
        .then(|| serde_json::to_string(&doc.trail).expect("trail serializes"));
    if !doc.meta.is_empty() || trail.is_some() {
        let mut meta: BTreeMap<&str, &str> = doc
            .meta
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        if let Some(t) = &trail {
            meta.insert(TRAIL_KEY, t);
        }
        out.push_str(",\"meta\":");
        out.push_str(&serde_json::to_string(&meta).expect("meta serializes"));
    }
    for (key, raw) in &doc.extra {
        if RESERVED.contains(&key.as_str()) {
            continue;
        }
        out.push(',');
        out.push_str(&json_str(key));
        out.push(':');
        out.push_str(raw);
    }
    out.push('}');
    out
}

pub fn write_records<'a, W: Write>(
    docs: impl IntoIterator<Item = &'a Document>,
    out: &mut W,
) -> Result<usize, WriteError> {
    let mut written = 0;
    for doc in docs {
        let mut line = format_record(doc);
        line.push('\n');
        out.write_all(line.as_bytes())
            .map_err(|source| WriteError { written, source })?;
        written += 1;
    }
    out.flush()
        .map_err(|source| WriteError { written, source })?;
    Ok(written)
}

/// Writes documents to `path`, replacing it; returns the number written.
pub fn write_corpus<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    path: &Path,
) -> Result<usize, WriteError> {
    let file = File::create(path).map_err(|source| WriteError { written: 0, source })?;
    write_records(docs, &mut BufWriter::new(file))
}
