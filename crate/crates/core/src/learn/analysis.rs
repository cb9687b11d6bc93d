//! Feature importance (MDI, permutation) and Spearman correlation with level.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::RandomForest;
use super::model::Model;
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    Mdi,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub feature: String,
    pub score: f64,
    /// Standard deviation over repeats (permutation only).
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub method: ImportanceMethod,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub baseline_accuracy: Option<f64>,
    /// Evaluation rows that were also training rows.
    pub rows_seen_in_training: Option<usize>,
    /// Sorted by score descending, then name.
    pub entries: Vec<ImportanceEntry>,
}

fn by_score_then_name(a: &ImportanceEntry, b: &ImportanceEntry) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.feature.cmp(&b.feature))
}

pub fn mdi_importance(forest: &RandomForest, names: &[String]) -> ImportanceReport {
    let mut entries: Vec<ImportanceEntry> = forest
        .mdi()
        .into_iter()
        .zip(names)
        .map(|(score, n)| ImportanceEntry {
            feature: n.clone(),
            score,
            std: None,
        })
        .collect();
    entries.sort_by(by_score_then_name);
    ImportanceReport {
        method: ImportanceMethod::Mdi,
        repeats: None,
        seed: None,
        baseline_accuracy: None,
        rows_seen_in_training: None,
        entries,
    }
}

fn accuracy(model: &Model, x: &[Vec<f64>], y: &[usize]) -> f64 {
    let hits = x
        .iter()
        .zip(y)
        .filter(|(r, &c)| model.predict(r) == c)
        .count();
    hits as f64 / y.len() as f64
}

/// Mean accuracy drop over `repeats` shuffles of each column. Feature `j`
/// draws its shuffles from a generator seeded with `seed + j`.
pub fn permutation_importance(
    model: &Model,
    x: &[Vec<f64>],
    y: &[usize],
    names: &[String],
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    if x.is_empty() {
        return Err(Error::InvalidArgument(
            "permutation importance needs evaluation rows".into(),
        ));
    }
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be >= 1".into()));
    }
    let baseline = accuracy(model, x, y);
    let mut entries: Vec<ImportanceEntry> = (0..names.len())
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
            let mut column: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let mut xs = x.to_vec();
            let drops: Vec<f64> = (0..repeats)
                .map(|_| {
                    column.shuffle(&mut rng);
                    for (row, &v) in xs.iter_mut().zip(&column) {
                        row[j] = v;
                    }
                    baseline - accuracy(model, &xs, y)
                })
                .collect();
            let mean = drops.iter().sum::<f64>() / repeats as f64;
            let var = drops.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / repeats as f64;
            ImportanceEntry {
                feature: names[j].clone(),
                score: mean,
                std: Some(var.sqrt()),
            }
        })
        .collect();
    entries.sort_by(by_score_then_name);
    Ok(ImportanceReport {
        method: ImportanceMethod::Permutation,
        repeats: Some(repeats),
        seed: Some(seed),
        baseline_accuracy: Some(baseline),
        rows_seen_in_training: None,
        entries,
    })
}

impl ImportanceReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "feature", "score", "std"])?;
        for (i, e) in self.entries.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                e.feature.clone(),
                e.score.to_string(),
                e.std.map_or(String::new(), |s| s.to_string()),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut s = match self.method {
            ImportanceMethod::Mdi => "mean decrease in impurity\n\n".to_string(),
            ImportanceMethod::Permutation => format!(
                "permutation importance (repeats {}, baseline accuracy {:.4})\n\n",
                self.repeats.unwrap_or(0),
                self.baseline_accuracy.unwrap_or(0.0)
            ),
        };
        let width = self
            .entries
            .iter()
            .map(|e| e.feature.len())
            .max()
            .unwrap_or(7)
            .max(7);
        s.push_str(&format!(
            "{:>4}  {:<width$}  {:>10}\n",
            "rank", "feature", "score"
        ));
        for (i, e) in self.entries.iter().enumerate() {
            s.push_str(&format!(
                "{:>4}  {:<width$}  {:>10.6}\n",
                i + 1,
                e.feature,
                e.score
            ));
        }
        s
    }
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    pearson(&average_ranks(a), &average_ranks(b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub feature: String,
    pub rho: f64,
    /// Rows where the feature was present.
    pub n: usize,
    /// rho is reported as 0 because the feature (or the level) did not vary.
    pub zero_variance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n_rows: usize,
    /// Sorted by |rho| descending, then name.
    pub entries: Vec<CorrelationEntry>,
}

/// Spearman rho of every feature against the level ordinal. Masked cells are
/// skipped pairwise.
pub fn spearman_correlation(matrix: &FeatureMatrix) -> Result<CorrelationReport> {
    if matrix.rows.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 rows, got {}",
            matrix.rows.len()
        )));
    }
    let mut entries: Vec<CorrelationEntry> = matrix
        .schema
        .features
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = matrix
                .rows
                .iter()
                .filter(|r| !r.absent[j])
                .map(|r| (r.values[j], r.level.ordinal() as f64))
                .unzip();
            let rho = if xs.len() >= 3 {
                spearman(&xs, &ys)
            } else {
                None
            };
            CorrelationEntry {
                feature: f.name.clone(),
                rho: rho.unwrap_or(0.0),
                n: xs.len(),
                zero_variance: rho.is_none(),
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.rho
            .abs()
            .total_cmp(&a.rho.abs())
            .then_with(|| a.feature.cmp(&b.feature))
    });
    Ok(CorrelationReport {
        n_rows: matrix.rows.len(),
        entries,
    })
}

impl CorrelationReport {
    pub fn top(&self, n: usize) -> CorrelationReport {
        CorrelationReport {
            n_rows: self.n_rows,
            entries: self.entries.iter().take(n).cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.feature.len())
            .max()
            .unwrap_or(7)
            .max(7);
        let mut s = format!("spearman correlation with level ({} rows)\n\n", self.n_rows);
        s.push_str(&format!(
            "{:>4}  {:<width$}  {:>8}\n",
            "rank", "feature", "rho"
        ));
        for (i, e) in self.entries.iter().enumerate() {
            let flag = if e.zero_variance {
                "  (zero variance)"
            } else {
                ""
            };
            s.push_str(&format!(
                "{:>4}  {:<width$}  {:>8.4}{flag}\n",
                i + 1,
                e.feature,
                e.rho
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ReadingLevel;
    use crate::learn::forest::ForestParams;
    use crate::matrix::{FeatureGroup, FeatureSchema, FeatureSpec, MatrixRow};
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 5.0]),
            vec![2.5, 4.0, 2.5, 1.0]
        );
    }

    fn matrix(cols: Vec<Vec<f64>>, levels: &[usize]) -> FeatureMatrix {
        let schema = FeatureSchema::new(
            (0..cols.len())
                .map(|j| FeatureSpec::new(FeatureGroup::Trad, &format!("f{j}")))
                .collect(),
        )
        .unwrap();
        let rows = levels
            .iter()
            .enumerate()
            .map(|(i, &l)| MatrixRow {
                doc_id: format!("d{i}"),
                level: ReadingLevel::from_ordinal(l).unwrap(),
                values: cols.iter().map(|c| c[i]).collect(),
                absent: vec![false; cols.len()],
            })
            .collect();
        FeatureMatrix { schema, rows }
    }

    #[test]
    fn level_itself_and_constants() {
        let levels = [0, 1, 2, 0, 1, 2];
        let up: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
        let down: Vec<f64> = up.iter().map(|v| -v).collect();
        let r = spearman_correlation(&matrix(vec![vec![4.0; 6], down, up], &levels)).unwrap();
        assert_eq!(r.entries[0].feature, "TRAD.f1");
        assert_eq!(r.entries[0].rho, -1.0);
        assert_eq!(r.entries[1].rho, 1.0);
        assert!(r.entries[2].zero_variance);
        assert_eq!(r.entries[2].rho, 0.0);
        assert!(spearman_correlation(&matrix(vec![vec![1.0, 2.0]], &[0, 1])).is_err());
    }

    #[test]
    fn permutation_of_constant_and_informative_columns() {
        let levels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let x: Vec<Vec<f64>> = levels.iter().map(|&l| vec![7.0, l as f64]).collect();
        let forest = RandomForest::fit(
            &x,
            &levels,
            3,
            &ForestParams {
                n_trees: 20,
                mtry: Some(2),
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let names = vec!["TRAD.c".to_string(), "TRAD.l".to_string()];
        let model = Model::Rf(forest.clone());
        let r = permutation_importance(&model, &x, &levels, &names, 10, 3).unwrap();
        let get = |n: &str| r.entries.iter().find(|e| e.feature == n).unwrap().score;
        assert_eq!(get("TRAD.c"), 0.0);
        // chance on balanced 3 classes is 1/3
        assert!(
            (get("TRAD.l") - (1.0 - 1.0 / 3.0)).abs() < 0.2,
            "{}",
            get("TRAD.l")
        );
        assert_eq!(
            r,
            permutation_importance(&model, &x, &levels, &names, 10, 3).unwrap()
        );

        let mdi = mdi_importance(&forest, &names);
        assert_eq!(mdi.entries[0].feature, "TRAD.l");
        assert_eq!(mdi.entries[0].score, 1.0);
        assert_eq!(mdi.entries[1].score, 0.0);
    }

    proptest! {
        #[test]
        fn rho_bounded(a in prop::collection::vec(-5i32..5, 3..30)) {
            let x: Vec<f64> = a.iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = (0..x.len()).map(|i| (i % 3) as f64).collect();
            if let Some(r) = spearman(&x, &y) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
