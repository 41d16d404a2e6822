use std::fs;
use std::path::{Path, PathBuf};

use embedlab_core::{StoreFormat, VectorStore};

use crate::args::Words;
use crate::Failure;

/// Splits `LABEL=PATH`. A value naming an existing file is always a path.
fn split_label(spec: &str) -> (Option<&str>, &str) {
    if Path::new(spec).exists() {
        return (None, spec);
    }
    match spec.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => (Some(label), path),
        _ => (None, spec),
    }
}

pub fn load_stores(specs: &[String], format: StoreFormat) -> Result<Vec<VectorStore>, Failure> {
    if specs.is_empty() {
        return Err(Failure::Usage("at least one --vectors file is required".into()));
    }
    let mut stores: Vec<VectorStore> = Vec::with_capacity(specs.len());
    for spec in specs {
        let (label, path) = split_label(spec);
        let mut store = VectorStore::load(path, format)?;
        if let Some(label) = label {
            store = store.with_label(label);
        }
        if stores.iter().any(|s| s.label() == store.label()) {
            return Err(Failure::Usage(format!(
                "two stores are labelled {:?}; name them with LABEL=PATH",
                store.label()
            )));
        }
        if store.duplicate_count() > 0 {
            eprintln!(
                "warning: {}: ignored {} duplicate token row(s), keeping the first occurrence",
                path,
                store.duplicate_count()
            );
        }
        stores.push(store);
    }
    Ok(stores)
}

pub fn select<'a>(stores: &'a [VectorStore], label: Option<&str>) -> Result<&'a VectorStore, Failure> {
    match label {
        None => Ok(&stores[0]),
        Some(l) => stores.iter().find(|s| s.label() == l).ok_or_else(|| {
            let known: Vec<&str> = stores.iter().map(|s| s.label()).collect();
            Failure::Usage(format!("no store labelled {l:?}; loaded: {}", known.join(", ")))
        }),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// Inline words followed by those from the file, blank lines skipped.
pub fn word_list(words: &Words) -> Result<Vec<String>, Failure> {
    let mut out: Vec<String> = words
        .words
        .iter()
        .map(|w| w.trim().to_string())
        .filter(|w| !w.is_empty())
        .collect();
    if let Some(path) = &words.words_file {
        out.extend(
            read(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
    }
    if out.is_empty() {
        return Err(Failure::Usage("no items given; use --words or --words-file".into()));
    }
    Ok(out)
}

/// Headerless two-column CSV of token pairs.
pub fn pairs(path: &PathBuf) -> Result<Vec<(String, String)>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 || record.iter().any(str::is_empty) {
            return Err(Failure::Data(format!(
                "{} line {line}: expected two tokens, found {:?}",
                path.display(),
                record.iter().collect::<Vec<_>>()
            )));
        }
        out.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(out)
}

/// One phrase per line.
pub fn texts(path: &Path) -> Result<Vec<String>, Failure> {
    Ok(read(path)?.lines().map(str::to_string).collect())
}
