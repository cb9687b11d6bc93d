//! Soft-label fusion: appends annotator class probabilities as extra columns.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{FeatureGroup, FeatureMatrix, FeatureSchema, FeatureSpec};

pub const NAMES: [&str; 3] = ["p_ele", "p_int", "p_adv"];

const SIMPLEX_TOL: f64 = 1e-6;

/// How the soft labels were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Each document was scored by a model that never saw it.
    OutOfFold,
    /// Scored by a model trained on the full corpus; leaks labels under CV.
    FullFit,
    /// The file did not say.
    Unknown,
}

impl Provenance {
    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "out_of_fold" => Ok(Provenance::OutOfFold),
            "full_fit" => Ok(Provenance::FullFit),
            other => Err(Error::SoftLabels(format!(
                "unknown provenance `{other}` (expected out_of_fold or full_fit)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftLabels {
    pub provenance: Provenance,
    /// (doc_id, [p_ele, p_int, p_adv]) in file order.
    pub rows: Vec<(String, [f64; 3])>,
}

impl SoftLabels {
    fn index(&self) -> HashMap<&str, [f64; 3]> {
        self.rows.iter().map(|(id, p)| (id.as_str(), *p)).collect()
    }
}

/// Parse `doc_id,p_ele,p_int,p_adv` with an optional leading
/// `# generated: out_of_fold|full_fit` line. All row problems are reported together.
pub fn parse_soft_labels(text: &str) -> Result<SoftLabels> {
    let mut provenance = Provenance::Unknown;
    let mut body = text;
    if let Some(first) = text.lines().next() {
        if let Some(comment) = first.trim_start().strip_prefix('#') {
            let value = comment.trim().strip_prefix("generated:").ok_or_else(|| {
                Error::SoftLabels(format!("unrecognised header comment `{}`", first.trim()))
            })?;
            provenance = Provenance::parse(value)?;
            body = &text[first.len()..];
            body = body.strip_prefix('\n').unwrap_or(body);
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let expected = ["doc_id", "p_ele", "p_int", "p_adv"];
    if header != expected {
        return Err(Error::SoftLabels(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.join(",")
        )));
    }

    let mut rows = Vec::new();
    let mut problems = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row_no = i + 1;
        let rec = rec?;
        let id = rec.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            problems.push(format!("row {row_no}: empty doc_id"));
            continue;
        }
        if let Some(prev) = seen.insert(id.clone(), row_no) {
            problems.push(format!(
                "row {row_no}: duplicate doc_id {id} (first at row {prev})"
            ));
            continue;
        }
        let mut p = [0.0; 3];
        let mut ok = true;
        for (k, slot) in p.iter_mut().enumerate() {
            match rec.get(k + 1).map(str::parse::<f64>) {
                Some(Ok(v)) if v.is_finite() => *slot = v,
                _ => {
                    problems.push(format!("row {row_no} ({id}): bad value for {}", NAMES[k]));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        if p.iter().any(|&v| v < 0.0) {
            problems.push(format!("row {row_no} ({id}): negative probability"));
            continue;
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            problems.push(format!("row {row_no} ({id}): probabilities sum to {sum}"));
            continue;
        }
        rows.push((id, p));
    }
    if !problems.is_empty() {
        return Err(Error::SoftLabels(problems.join("; ")));
    }
    Ok(SoftLabels { provenance, rows })
}

pub fn load_soft_labels(path: &Path) -> Result<SoftLabels> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_soft_labels(&text)
}

/// Append the three HYBRID columns. Every matrix row needs a soft label.
pub fn fuse(matrix: &FeatureMatrix, labels: &SoftLabels) -> Result<FeatureMatrix> {
    if matrix.schema.groups().contains(&FeatureGroup::Hybrid) {
        return Err(Error::SoftLabels(
            "matrix already has HYBRID columns".into(),
        ));
    }
    let index = labels.index();
    let missing: Vec<&str> = matrix
        .rows
        .iter()
        .map(|r| r.doc_id.as_str())
        .filter(|id| !index.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::SoftLabels(format!(
            "no soft labels for documents: {}",
            missing.join(", ")
        )));
    }
    let mut features = matrix.schema.features.clone();
    features.extend(
        NAMES
            .iter()
            .map(|n| FeatureSpec::new(FeatureGroup::Hybrid, n)),
    );
    let schema = FeatureSchema::new(features)?;
    let rows = matrix
        .rows
        .iter()
        .map(|r| {
            let mut row = r.clone();
            row.values.extend(index[r.doc_id.as_str()]);
            row.absent.extend([false; 3]);
            row
        })
        .collect();
    Ok(FeatureMatrix { schema, rows })
}

/// Cross-validating on soft labels that saw the evaluation folds overstates accuracy.
pub fn check_cv_allowed(schema: &FeatureSchema, provenance: Option<Provenance>) -> Result<()> {
    if !schema.groups().contains(&FeatureGroup::Hybrid) {
        return Ok(());
    }
    match provenance {
        Some(Provenance::OutOfFold) => Ok(()),
        other => Err(Error::SoftLabels(format!(
            "cross-validation on HYBRID features needs out-of-fold soft labels (provenance: {})",
            match other {
                Some(Provenance::FullFit) => "full_fit",
                _ => "unknown",
            }
        ))),
    }
}
