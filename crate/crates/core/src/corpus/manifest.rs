use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::conllu::parse_conllu;
use super::model::{Document, ReadingLevel};
use super::tree::parse_tree_lines;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub doc_id: String,
    pub level: ReadingLevel,
    pub conllu_path: PathBuf,
    pub trees_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusManifest {
    pub rows: Vec<ManifestRow>,
}

impl CorpusManifest {
    pub fn level_counts(&self) -> BTreeMap<ReadingLevel, usize> {
        let mut counts: BTreeMap<ReadingLevel, usize> =
            ReadingLevel::ALL.iter().map(|&l| (l, 0)).collect();
        for r in &self.rows {
            *counts.entry(r.level).or_default() += 1;
        }
        counts
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub documents: Vec<Document>,
}

#[derive(Deserialize)]
struct RawRow {
    doc_id: String,
    level: String,
    conllu_path: String,
    #[serde(default)]
    trees_path: Option<String>,
}

/// Read a CoNLL-U file (plus optional trees file) as one document.
pub fn load_document(
    doc_id: &str,
    level: ReadingLevel,
    conllu_path: &Path,
    trees_path: Option<&Path>,
) -> Result<Document> {
    let text = fs::read_to_string(conllu_path).map_err(|e| Error::io(conllu_path, e))?;
    let mut sentences = parse_conllu(&text)?;
    if sentences.is_empty() {
        return Err(Error::degenerate("document has no sentences").in_doc(doc_id));
    }
    if let Some(tp) = trees_path {
        let text = fs::read_to_string(tp).map_err(|e| Error::io(tp, e))?;
        let trees = parse_tree_lines(&text)?;
        if trees.len() > sentences.len() {
            return Err(Error::InvalidArgument(format!(
                "{}: {} trees for {} sentences",
                tp.display(),
                trees.len(),
                sentences.len()
            )));
        }
        for (s, t) in sentences.iter_mut().zip(trees) {
            s.const_tree = t;
        }
    }
    Ok(Document {
        doc_id: doc_id.to_string(),
        level,
        sentences,
    })
}

/// Load a manifest CSV and every document it lists. Relative paths resolve
/// against the manifest's directory. All offending rows are reported together.
pub fn load_manifest(path: &Path) -> Result<Corpus> {
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);

    let header = reader.headers()?.clone();
    let expected = ["doc_id", "level", "conllu_path", "trees_path"];
    if header.iter().collect::<Vec<_>>() != expected[..header.len().min(4)] || header.len() < 3 {
        return Err(Error::Manifest(vec![format!(
            "header must be `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )]));
    }

    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<RawRow>().enumerate() {
        let row_no = i + 2;
        let raw = match rec {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("row {row_no}: {e}"));
                continue;
            }
        };
        if !seen.insert(raw.doc_id.clone()) {
            problems.push(format!("row {row_no}: duplicate doc_id: {}", raw.doc_id));
            continue;
        }
        let level = match raw.level.parse::<ReadingLevel>() {
            Ok(l) => l,
            Err(e) => {
                problems.push(format!("row {row_no}: {e}"));
                continue;
            }
        };
        let trees_path = raw
            .trees_path
            .filter(|p| !p.is_empty())
            .map(|p| base.join(p));
        rows.push(ManifestRow {
            doc_id: raw.doc_id,
            level,
            conllu_path: base.join(raw.conllu_path),
            trees_path,
        });
    }
    if rows.is_empty() && problems.is_empty() {
        problems.push("manifest lists no documents".to_string());
    }

    let mut documents = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        match load_document(&r.doc_id, r.level, &r.conllu_path, r.trees_path.as_deref()) {
            Ok(d) => documents.push(d),
            Err(e) => problems.push(format!("document {} (entry {}): {e}", r.doc_id, i + 1)),
        }
    }
    if !problems.is_empty() {
        return Err(Error::Manifest(problems));
    }
    Ok(Corpus {
        manifest: CorpusManifest { rows },
        documents,
    })
}
