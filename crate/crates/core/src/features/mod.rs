//! Feature groups and the registry that assembles them into a matrix.

pub mod disco;
pub mod lxsm;
pub mod morph;
pub mod synx;
pub mod trad;

#[cfg(test)]
pub(crate) mod testutil;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::hybrid::Provenance;
use crate::lexicon::Lexicon;
use crate::matrix::{FeatureGroup, FeatureMatrix, FeatureSchema, FeatureSpec, MatrixRow};

use self::lxsm::Lexicons;
use self::synx::PhraseSource;

/// Short feature names of one group, in column order.
pub fn group_feature_names(group: FeatureGroup) -> Vec<String> {
    let owned = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
    match group {
        FeatureGroup::Trad => owned(&trad::NAMES),
        FeatureGroup::Lxsm => owned(&lxsm::NAMES),
        FeatureGroup::Synx => synx::names(),
        FeatureGroup::Morph => morph::names(),
        FeatureGroup::Disco => owned(&disco::NAMES),
        FeatureGroup::Hybrid => owned(&crate::hybrid::NAMES),
    }
}

/// Schema for a set of linguistic groups, in canonical group order.
pub fn schema_for(groups: &[FeatureGroup]) -> Result<FeatureSchema> {
    let mut specs = Vec::new();
    for g in FeatureGroup::LINGUISTIC {
        if groups.contains(&g) {
            specs.extend(
                group_feature_names(g)
                    .iter()
                    .map(|n| FeatureSpec::new(g, n)),
            );
        }
    }
    FeatureSchema::new(specs)
}

/// Configuration plus loaded resources for one extraction run.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub config: Config,
    pub groups: Vec<FeatureGroup>,
    lexicons: Lexicons,
}

impl Extractor {
    /// Validate the group selection and load the lexicons LXSM needs.
    pub fn new(config: Config, groups: &[FeatureGroup]) -> Result<Self> {
        config.validate()?;
        let mut groups: Vec<FeatureGroup> = groups.to_vec();
        groups.sort();
        groups.dedup();
        if groups.is_empty() {
            return Err(Error::InvalidArgument("no feature groups selected".into()));
        }
        if groups.contains(&FeatureGroup::Hybrid) {
            return Err(Error::InvalidArgument(
                "HYBRID features come from soft labels; use `fuse`".into(),
            ));
        }
        let lexicons = if groups.contains(&FeatureGroup::Lxsm) {
            let need = |p: &Option<std::path::PathBuf>, key: &str| {
                p.clone().ok_or_else(|| {
                    Error::Config(format!(
                        "LXSM features need a lexicon file at `lexicons.{key}`"
                    ))
                })
            };
            Lexicons {
                early: Lexicon::load_frequencies(&need(&config.lexicons.early, "early")?)?,
                late: Lexicon::load_frequencies(&need(&config.lexicons.late, "late")?)?,
                basic_words: Lexicon::load_word_list(&need(
                    &config.lexicons.basic_words,
                    "basic_words",
                )?)?,
            }
        } else {
            Lexicons::default()
        };
        Ok(Extractor {
            config,
            groups,
            lexicons,
        })
    }

    /// Build with lexicons already in memory; lexicon paths in `config` are ignored.
    pub fn with_lexicons(
        config: Config,
        groups: &[FeatureGroup],
        lexicons: Lexicons,
    ) -> Result<Self> {
        let mut stripped: Vec<FeatureGroup> = groups
            .iter()
            .copied()
            .filter(|g| *g != FeatureGroup::Lxsm)
            .collect();
        if stripped.is_empty() {
            stripped.push(FeatureGroup::Trad);
        }
        let mut ex = Extractor::new(config, &stripped)?;
        ex.groups = groups.to_vec();
        ex.groups.sort();
        ex.groups.dedup();
        ex.lexicons = lexicons;
        Ok(ex)
    }

    pub fn schema(&self) -> Result<FeatureSchema> {
        schema_for(&self.groups)
    }

    /// Features of one document for the selected groups.
    pub fn extract_document(&self, doc: &Document) -> Result<DocumentFeatures> {
        let mut out = DocumentFeatures::default();
        for &g in &self.groups {
            match g {
                FeatureGroup::Trad => {
                    out.push_all(trad::extract_trad(doc, &self.config.formulas)?.values())
                }
                FeatureGroup::Lxsm => out.push_all(
                    lxsm::extract_lxsm(doc, &self.lexicons, self.config.lxsm.mattr_window)
                        .map_err(|e| e.in_doc(&doc.doc_id))?
                        .values(),
                ),
                FeatureGroup::Synx => {
                    let f = synx::extract_synx(doc, &self.config.synx)?;
                    out.values.extend(f.values());
                    out.absent.extend(f.absent());
                    out.phrase_source = Some(f.phrase_source);
                }
                FeatureGroup::Morph => {
                    let f = morph::extract_morph(doc, &self.config.morph)?;
                    out.values.extend(f.values);
                    out.absent.extend(f.absent);
                    out.mci_fallbacks = f.fallbacks;
                }
                FeatureGroup::Disco => out.push_all(disco::extract_disco(doc)?.values()),
                FeatureGroup::Hybrid => unreachable!("rejected in Extractor::new"),
            }
        }
        // absent slots carry the sentinel 0
        for (v, &a) in out.values.iter_mut().zip(&out.absent) {
            if a {
                *v = 0.0;
            }
        }
        Ok(out)
    }

    /// Extract every document in parallel. Rows keep document order.
    pub fn extract_all(&self, documents: &[Document]) -> Result<Extraction> {
        let schema = self.schema()?;
        let results: Vec<Result<DocumentFeatures>> = documents
            .par_iter()
            .map(|d| self.extract_document(d).map_err(|e| e.in_doc(&d.doc_id)))
            .collect();

        let mut failed = Vec::new();
        let mut first_err = None;
        let mut rows = Vec::with_capacity(documents.len());
        let mut phrase_sources: BTreeMap<String, usize> = BTreeMap::new();
        let mut mci_fallbacks = 0;
        for (doc, res) in documents.iter().zip(results) {
            match res {
                Ok(f) => {
                    if let Some(src) = f.phrase_source {
                        let key = serde_json::to_value(src)?
                            .as_str()
                            .unwrap_or_default()
                            .to_string();
                        *phrase_sources.entry(key).or_default() += 1;
                    }
                    mci_fallbacks += f.mci_fallbacks;
                    rows.push(MatrixRow {
                        doc_id: doc.doc_id.clone(),
                        level: doc.level,
                        values: f.values,
                        absent: f.absent,
                    });
                }
                Err(e) => {
                    failed.push(doc.doc_id.clone());
                    first_err.get_or_insert(e);
                }
            }
        }
        if let Some(first) = first_err {
            return Err(Error::Extraction {
                doc_ids: failed,
                first: Box::new(first),
            });
        }
        let metadata = ExtractionMetadata {
            schema_version: schema.schema_version.clone(),
            schema: schema.clone(),
            groups: self.groups.clone(),
            seed: self.config.morph.seed,
            config: self.config.clone(),
            documents: documents.len(),
            phrase_sources,
            mci_replacement_fallbacks: mci_fallbacks,
            soft_labels: None,
        };
        Ok(Extraction {
            matrix: FeatureMatrix { schema, rows },
            metadata,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentFeatures {
    pub values: Vec<f64>,
    pub absent: Vec<bool>,
    pub phrase_source: Option<PhraseSource>,
    pub mci_fallbacks: usize,
}

impl DocumentFeatures {
    fn push_all(&mut self, values: Vec<f64>) {
        self.absent.extend(std::iter::repeat_n(false, values.len()));
        self.values.extend(values);
    }
}

/// Written beside every matrix so a run can be reproduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionMetadata {
    pub schema_version: String,
    pub schema: FeatureSchema,
    pub groups: Vec<FeatureGroup>,
    pub seed: u64,
    pub config: Config,
    pub documents: usize,
    /// Documents per phrase-count source (constituency / dependency / mixed).
    pub phrase_sources: BTreeMap<String, usize>,
    /// MCI estimates that had to sample with replacement.
    pub mci_replacement_fallbacks: usize,
    /// Set once soft labels have been fused into the matrix.
    pub soft_labels: Option<Provenance>,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub matrix: FeatureMatrix,
    pub metadata: ExtractionMetadata,
}
