//! Named feature schema, feature matrix with absence mask, train-fold
//! imputation, and CSV serialization.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::ReadingLevel;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureGroup {
    Trad,
    Lxsm,
    Synx,
    Morph,
    Disco,
    Hybrid,
}

impl FeatureGroup {
    /// The linguistic groups, in canonical column order.
    pub const LINGUISTIC: [FeatureGroup; 5] = [
        FeatureGroup::Trad,
        FeatureGroup::Lxsm,
        FeatureGroup::Synx,
        FeatureGroup::Morph,
        FeatureGroup::Disco,
    ];

    pub fn code(self) -> &'static str {
        match self {
            FeatureGroup::Trad => "TRAD",
            FeatureGroup::Lxsm => "LXSM",
            FeatureGroup::Synx => "SYNX",
            FeatureGroup::Morph => "MORPH",
            FeatureGroup::Disco => "DISCO",
            FeatureGroup::Hybrid => "HYBRID",
        }
    }

    /// Parse a comma-separated list such as `TRAD,LXSM` or `ALL`.
    /// The result is deduplicated and in canonical order.
    pub fn parse_list(s: &str) -> Result<Vec<FeatureGroup>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("ALL") {
                out.extend(Self::LINGUISTIC);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no feature groups selected".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        [
            FeatureGroup::Trad,
            FeatureGroup::Lxsm,
            FeatureGroup::Synx,
            FeatureGroup::Morph,
            FeatureGroup::Disco,
            FeatureGroup::Hybrid,
        ]
        .into_iter()
        .find(|g| g.code() == upper || (upper == "SYN" && *g == FeatureGroup::Synx))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown feature group: {s}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    /// Fully qualified `<GROUP>.<name>`.
    pub name: String,
    pub group: FeatureGroup,
}

impl FeatureSpec {
    pub fn new(group: FeatureGroup, short: &str) -> Self {
        FeatureSpec {
            name: format!("{}.{short}", group.code()),
            group,
        }
    }

    /// Recover the group from a qualified name.
    pub fn from_qualified(name: &str) -> Result<Self> {
        let (g, rest) = name.split_once('.').ok_or_else(|| {
            Error::Schema(format!("column `{name}` is not of the form GROUP.name"))
        })?;
        if rest.is_empty() {
            return Err(Error::Schema(format!(
                "column `{name}` has an empty feature name"
            )));
        }
        let group = g
            .parse()
            .map_err(|_| Error::Schema(format!("column `{name}` has unknown group `{g}`")))?;
        Ok(FeatureSpec {
            name: name.to_string(),
            group,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub schema_version: String,
    pub features: Vec<FeatureSpec>,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, f) in features.iter().enumerate() {
            if let Some(j) = seen.insert(f.name.as_str(), i) {
                return Err(Error::Schema(format!(
                    "duplicate feature `{}` at columns {j} and {i}",
                    f.name
                )));
            }
        }
        Ok(FeatureSchema {
            schema_version: SCHEMA_VERSION.to_string(),
            features,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn groups(&self) -> Vec<FeatureGroup> {
        let mut g: Vec<_> = self.features.iter().map(|f| f.group).collect();
        g.sort();
        g.dedup();
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub doc_id: String,
    pub level: ReadingLevel,
    pub values: Vec<f64>,
    /// `true` marks a missing value; its slot in `values` holds 0.
    pub absent: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub schema: FeatureSchema,
    pub rows: Vec<MatrixRow>,
}

impl FeatureMatrix {
    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.level.ordinal()).collect()
    }

    pub fn has_absent(&self) -> bool {
        self.rows.iter().any(|r| r.absent.iter().any(|&a| a))
    }

    /// Columns at `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<FeatureMatrix> {
        let schema = FeatureSchema::new(
            indices
                .iter()
                .map(|&i| self.schema.features[i].clone())
                .collect(),
        )?;
        let rows = self
            .rows
            .iter()
            .map(|r| MatrixRow {
                doc_id: r.doc_id.clone(),
                level: r.level,
                values: indices.iter().map(|&i| r.values[i]).collect(),
                absent: indices.iter().map(|&i| r.absent[i]).collect(),
            })
            .collect();
        Ok(FeatureMatrix { schema, rows })
    }

    /// Keep only the given groups, preserving column order.
    pub fn select_groups(&self, groups: &[FeatureGroup]) -> FeatureMatrix {
        let idx: Vec<usize> = self
            .schema
            .features
            .iter()
            .enumerate()
            .filter(|(_, f)| groups.contains(&f.group))
            .map(|(i, _)| i)
            .collect();
        self.select_columns(&idx).expect("subset of a valid schema")
    }

    /// Re-map columns by name onto `schema`. Every schema feature must be
    /// present; extra columns are dropped.
    pub fn align_to(&self, schema: &FeatureSchema) -> Result<FeatureMatrix> {
        let mut idx = Vec::with_capacity(schema.len());
        let mut missing = Vec::new();
        for f in &schema.features {
            match self.schema.index_of(&f.name) {
                Some(i) => idx.push(i),
                None => missing.push(f.name.clone()),
            }
        }
        if !missing.is_empty() {
            return Err(Error::Schema(format!(
                "matrix lacks features required by the model: {}",
                missing.join(", ")
            )));
        }
        self.select_columns(&idx)
    }

    /// Rows at `indices`.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

/// Per-feature means over training rows, used to fill masked cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputer {
    pub means: Vec<f64>,
}

impl Imputer {
    /// Fit on training rows only. Columns masked in every row impute 0;
    /// their names are returned as warnings.
    pub fn fit(matrix: &FeatureMatrix) -> (Imputer, Vec<String>) {
        let p = matrix.n_features();
        let mut sums = vec![0.0; p];
        let mut counts = vec![0usize; p];
        for r in &matrix.rows {
            for j in 0..p {
                if !r.absent[j] {
                    sums[j] += r.values[j];
                    counts[j] += 1;
                }
            }
        }
        let mut warnings = Vec::new();
        let means = (0..p)
            .map(|j| {
                if counts[j] == 0 {
                    if matrix.rows.iter().any(|r| r.absent[j]) {
                        warnings.push(matrix.schema.features[j].name.clone());
                    }
                    0.0
                } else {
                    sums[j] / counts[j] as f64
                }
            })
            .collect();
        for w in &warnings {
            log::warn!("feature {w} is missing in every training row; imputing 0");
        }
        (Imputer { means }, warnings)
    }

    pub fn apply_row(&self, row: &MatrixRow) -> Vec<f64> {
        row.values
            .iter()
            .zip(&row.absent)
            .zip(&self.means)
            .map(|((&v, &a), &m)| if a { m } else { v })
            .collect()
    }

    pub fn apply(&self, matrix: &FeatureMatrix) -> Vec<Vec<f64>> {
        matrix.rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

pub fn write_matrix<W: Write>(matrix: &FeatureMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["doc_id".to_string(), "level".to_string()];
    header.extend(matrix.schema.names().map(str::to_string));
    w.write_record(&header)?;
    for r in &matrix.rows {
        let mut rec = vec![r.doc_id.clone(), r.level.code().to_string()];
        rec.extend(r.values.iter().zip(&r.absent).map(|(v, &a)| {
            if a {
                String::new()
            } else {
                v.to_string()
            }
        }));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<matrix>", e))?;
    Ok(())
}

/// Read a matrix CSV. With `expected`, columns are matched to that schema by
/// name (any order); without it, the schema is taken from the header.
pub fn read_matrix<R: Read>(input: R, expected: Option<&FeatureSchema>) -> Result<FeatureMatrix> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.len() < 2 || &header[0] != "doc_id" || &header[1] != "level" {
        return Err(Error::Schema(
            "matrix header must start with `doc_id,level`".into(),
        ));
    }
    let columns: Vec<&str> = header.iter().skip(2).collect();
    let (schema, mapping) = match expected {
        Some(schema) => {
            let mut mapping = vec![usize::MAX; schema.len()];
            let mut unknown = Vec::new();
            for (c, name) in columns.iter().enumerate() {
                match schema.index_of(name) {
                    Some(j) if mapping[j] == usize::MAX => mapping[j] = c,
                    Some(_) => unknown.push(format!("{name} (duplicate)")),
                    None => unknown.push(name.to_string()),
                }
            }
            let missing: Vec<&str> = schema
                .features
                .iter()
                .zip(&mapping)
                .filter(|(_, &m)| m == usize::MAX)
                .map(|(f, _)| f.name.as_str())
                .collect();
            if !unknown.is_empty() || !missing.is_empty() {
                return Err(Error::Schema(format!(
                    "matrix columns do not match schema; unknown: [{}], missing: [{}]",
                    unknown.join(", "),
                    missing.join(", ")
                )));
            }
            (schema.clone(), mapping)
        }
        None => {
            let specs = columns
                .iter()
                .map(|c| FeatureSpec::from_qualified(c))
                .collect::<Result<Vec<_>>>()?;
            (FeatureSchema::new(specs)?, (0..columns.len()).collect())
        }
    };

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let level: ReadingLevel = rec[1]
            .parse()
            .map_err(|e: String| Error::Schema(format!("row {line}: {e}")))?;
        let mut values = Vec::with_capacity(schema.len());
        let mut absent = Vec::with_capacity(schema.len());
        for &c in &mapping {
            let cell = &rec[c + 2];
            if cell.is_empty() {
                values.push(0.0);
                absent.push(true);
            } else {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::Schema(format!("row {line}: non-numeric cell `{cell}`")))?;
                values.push(v);
                absent.push(false);
            }
        }
        rows.push(MatrixRow {
            doc_id: rec[0].to_string(),
            level,
            values,
            absent,
        });
    }
    Ok(FeatureMatrix { schema, rows })
}
