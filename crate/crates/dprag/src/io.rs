//! File formats: JSONL corpora, question and membership sets, scripted
//! generator tables, plain-text training data, traces and CSV output.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dprag_core::engine::{GenerationTrace, RunConfig};
use dprag_core::evaluation::{Membership, MiaExample, QaExample};
use dprag_core::generation::{context_key, ScriptTable};
use dprag_core::retrieval::Document;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| CliError::data(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::data(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| CliError::data(path, format!("line {}: {e}", n + 1)))?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| CliError::data(path, e))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let docs: Vec<Document> = read_jsonl(path)?;
    if docs.is_empty() {
        return Err(CliError::data(path, "corpus is empty"));
    }
    Ok(docs)
}

pub fn read_questions(path: &Path) -> Result<Vec<QaExample>> {
    let questions: Vec<QaExample> = read_jsonl(path)?;
    if let Some(i) = questions.iter().position(|q| q.answers.is_empty()) {
        return Err(CliError::data(path, format!("question {} has no answers", i + 1)));
    }
    Ok(questions)
}

/// A line of a membership set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiaRecord {
    pub doc_id: String,
    pub text: String,
    pub membership: Membership,
}

pub fn read_mia(path: &Path) -> Result<Vec<MiaExample>> {
    let records: Vec<MiaRecord> = read_jsonl(path)?;
    records
        .into_iter()
        .map(|r| {
            let owner = r.doc_id.clone();
            MiaExample::new(Document::new(r.doc_id, r.text, owner), r.membership).map_err(|e| CliError::data(path, e))
        })
        .collect()
}

pub fn read_script(path: &Path) -> Result<ScriptTable> {
    let text = fs::read_to_string(path).map_err(|e| CliError::data(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::data(path, e))
}

/// Training text: one passage per non-blank line.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::data(path, e))?;
    Ok(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_owned).collect())
}

/// First 16 hex digits of the SHA-256 of the run configuration and
/// question, so distinct runs sharing a seed get distinct trace files.
pub fn run_hash(cfg: &RunConfig, question: &str) -> String {
    let body = serde_json::to_string(&(cfg, question)).expect("run configs serialize");
    context_key(&body)[..16].to_owned()
}

pub fn trace_path(dir: &Path, cfg: &RunConfig, question: &str) -> PathBuf {
    dir.join(format!("trace-{}-{}.json", run_hash(cfg, question), cfg.seed))
}

pub fn write_trace(dir: &Path, cfg: &RunConfig, question: &str, trace: &GenerationTrace) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = trace_path(dir, cfg, question);
    let mut body = serde_json::to_string_pretty(trace).map_err(|e| CliError::data(&path, e))?;
    body.push('\n');
    fs::write(&path, body)?;
    Ok(path)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::data(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::data(path, e))?;
    }
    w.flush()?;
    Ok(())
}
