//! Model kinds, parameters and the versioned model file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::{ForestParams, RandomForest};
use super::logreg::{LogRegParams, LogisticRegression};
use crate::corpus::ReadingLevel;
use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, FeatureSchema, Imputer, SCHEMA_VERSION};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Rf,
    Logreg,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rf" => Ok(ModelKind::Rf),
            "logreg" => Ok(ModelKind::Logreg),
            _ => Err(Error::InvalidArgument(format!(
                "unknown model `{s}` (expected rf or logreg)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Rf => "rf",
            ModelKind::Logreg => "logreg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Rf(ForestParams),
    Logreg(LogRegParams),
}

impl ModelParams {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Rf => ModelParams::Rf(ForestParams::default()),
            ModelKind::Logreg => ModelParams::Logreg(LogRegParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Rf(_) => ModelKind::Rf,
            ModelParams::Logreg(_) => ModelKind::Logreg,
        }
    }

    pub fn fit(&self, x: &[Vec<f64>], y: &[usize], seed: u64) -> Result<Model> {
        Ok(match self {
            ModelParams::Rf(p) => Model::Rf(RandomForest::fit(x, y, ReadingLevel::COUNT, p, seed)?),
            ModelParams::Logreg(p) => {
                let m = LogisticRegression::fit(x, y, ReadingLevel::COUNT, p)?;
                if !m.convergence.converged {
                    log::warn!(
                        "logistic regression stopped after {} iterations (gradient norm {:.3e})",
                        m.convergence.iterations,
                        m.convergence.gradient_norm
                    );
                }
                Model::Logreg(m)
            }
        })
    }

    /// Compact description for report tables.
    pub fn describe(&self) -> String {
        match self {
            ModelParams::Rf(p) => format!(
                "rf n_trees={} mtry={} min_leaf={} max_depth={}",
                p.n_trees,
                p.mtry.map_or("sqrt".to_string(), |m| m.to_string()),
                p.min_leaf,
                p.max_depth.map_or("none".to_string(), |d| d.to_string())
            ),
            ModelParams::Logreg(p) => format!(
                "logreg l2_lambda={} max_iter={} tol={}",
                p.l2_lambda, p.max_iter, p.tol
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Rf(RandomForest),
    Logreg(LogisticRegression),
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            Model::Rf(m) => m.predict(x),
            Model::Logreg(m) => m.predict(x),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Model::Rf(m) => m.predict_proba(x),
            Model::Logreg(m) => m.predict_proba(x),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Rf(_) => ModelKind::Rf,
            Model::Logreg(_) => ModelKind::Logreg,
        }
    }

    pub fn did_not_converge(&self) -> bool {
        matches!(self, Model::Logreg(m) if !m.convergence.converged)
    }
}

/// Everything needed to apply a trained model to a new matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub schema: FeatureSchema,
    pub imputer: Imputer,
    pub params: ModelParams,
    pub seed: u64,
    pub training_doc_ids: Vec<String>,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    pub level: ReadingLevel,
    pub probabilities: Vec<f64>,
}

impl ModelFile {
    /// Impute and fit on the whole matrix.
    pub fn train(matrix: &FeatureMatrix, params: &ModelParams, seed: u64) -> Result<Self> {
        let (imputer, _) = Imputer::fit(matrix);
        let x = imputer.apply(matrix);
        let model = params.fit(&x, &matrix.labels(), seed)?;
        Ok(ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            schema: matrix.schema.clone(),
            imputer,
            params: *params,
            seed,
            training_doc_ids: matrix.rows.iter().map(|r| r.doc_id.clone()).collect(),
            model,
        })
    }

    /// Rows of `matrix` mapped onto the model's schema and imputed.
    pub fn design(&self, matrix: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        let aligned = matrix.align_to(&self.schema)?;
        Ok(self.imputer.apply(&aligned))
    }

    pub fn predict(&self, matrix: &FeatureMatrix) -> Result<Vec<Prediction>> {
        let x = self.design(matrix)?;
        Ok(matrix
            .rows
            .iter()
            .zip(&x)
            .map(|(r, xi)| Prediction {
                doc_id: r.doc_id.clone(),
                level: ReadingLevel::from_ordinal(self.model.predict(xi)).expect("class in range"),
                probabilities: self.model.predict_proba(xi),
            })
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value.get("format_version").and_then(|v| v.as_u64());
        if version != Some(MODEL_FORMAT_VERSION as u64) {
            return Err(Error::Model(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                version.map_or("missing".to_string(), |v| v.to_string())
            )));
        }
        let schema_version = value
            .pointer("/schema/schema_version")
            .and_then(|v| v.as_str())
            .unwrap_or("missing");
        if schema_version != SCHEMA_VERSION {
            return Err(Error::Model(format!(
                "model uses feature schema version {schema_version}, this build reads {SCHEMA_VERSION}"
            )));
        }
        let file: ModelFile = serde_json::from_value(value)?;
        if file.imputer.means.len() != file.schema.len() {
            return Err(Error::Model(
                "imputer does not match the model schema".into(),
            ));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{FeatureGroup, FeatureSpec, MatrixRow};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy(n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = FeatureSchema::new(vec![
            FeatureSpec::new(FeatureGroup::Trad, "atesman"),
            FeatureSpec::new(FeatureGroup::Lxsm, "ttr"),
        ])
        .unwrap();
        let rows = (0..n)
            .map(|i| {
                let c = i % 3;
                MatrixRow {
                    doc_id: format!("d{i}"),
                    level: ReadingLevel::from_ordinal(c).unwrap(),
                    values: vec![c as f64 + rng.gen_range(-0.4..0.4), rng.gen()],
                    absent: vec![false, i == 4],
                }
            })
            .collect();
        FeatureMatrix { schema, rows }
    }

    #[test]
    fn round_trip_keeps_predictions() {
        let m = toy(30, 1);
        for params in [
            ModelParams::Rf(ForestParams {
                n_trees: 25,
                ..Default::default()
            }),
            ModelParams::Logreg(LogRegParams::default()),
        ] {
            let file = ModelFile::train(&m, &params, 9).unwrap();
            let back = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
            assert_eq!(file, back);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..100 {
                let x = [rng.gen_range(-1.0..3.0), rng.gen()];
                assert_eq!(file.model.predict(&x), back.model.predict(&x));
                assert_eq!(file.model.predict_proba(&x), back.model.predict_proba(&x));
            }
        }
    }

    #[test]
    fn truncated_and_mismatched_files() {
        let file = ModelFile::train(
            &toy(30, 1),
            &ModelParams::Logreg(LogRegParams::default()),
            0,
        )
        .unwrap();
        let json = file.to_json().unwrap();
        assert!(ModelFile::from_json(&json[..json.len() / 2]).is_err());
        let bumped = json.replacen("\"schema_version\": \"1\"", "\"schema_version\": \"99\"", 1);
        let e = ModelFile::from_json(&bumped).unwrap_err().to_string();
        assert!(e.contains("schema version 99"), "{e}");

        let other = toy(30, 1).select_groups(&[FeatureGroup::Trad]);
        let e = file.predict(&other).unwrap_err().to_string();
        assert!(e.contains("LXSM.ttr"), "{e}");
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("RF".parse::<ModelKind>().unwrap(), ModelKind::Rf);
        assert!("svm".parse::<ModelKind>().is_err());
    }
}
