//! Stratified k-fold assignment, classification metrics and cross-validated evaluation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::ModelParams;
use super::search::{hyperparameter_search, SearchResult};
use crate::corpus::ReadingLevel;
use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, Imputer};

/// Fold index per row. Each class is shuffled with the seed and dealt
/// round-robin, continuing from where the previous class stopped, so fold
/// sizes differ by at most one.
pub fn stratified_kfold(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be >= 2".into()));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class
            .get_mut(c)
            .ok_or_else(|| Error::InvalidArgument(format!("label {c} out of range")))?
            .push(i);
    }
    for (c, rows) in by_class.iter().enumerate() {
        if !rows.is_empty() && rows.len() < k {
            let name =
                ReadingLevel::from_ordinal(c).map_or(c.to_string(), |l| l.code().to_string());
            return Err(Error::InvalidArgument(format!(
                "class {name} has {} rows, fewer than k={k}; use a smaller k (at most {})",
                rows.len(),
                rows.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    let mut offset = 0;
    for rows in &mut by_class {
        rows.shuffle(&mut rng);
        for (j, &r) in rows.iter().enumerate() {
            folds[r] = (offset + j) % k;
        }
        offset = (offset + rows.len()) % k;
    }
    Ok(folds)
}

/// Rows true class, columns predicted class.
pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        m[t][p] += 1;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Macro averages over every class; a zero denominator scores 0.
pub fn metrics_from_confusion(cm: &[Vec<usize>]) -> Metrics {
    let k = cm.len();
    let total: usize = cm.iter().flatten().sum();
    let diag: usize = (0..k).map(|i| cm[i][i]).sum();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (mut p_sum, mut r_sum, mut f_sum) = (0.0, 0.0, 0.0);
    for c in 0..k {
        let tp = cm[c][c];
        let predicted: usize = (0..k).map(|r| cm[r][c]).sum();
        let actual: usize = cm[c].iter().sum();
        let p = ratio(tp, predicted);
        let r = ratio(tp, actual);
        p_sum += p;
        r_sum += r;
        f_sum += if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
    }
    let k = k as f64;
    Metrics {
        accuracy: ratio(diag, total),
        macro_precision: p_sum / k,
        macro_recall: r_sum / k,
        macro_f1: f_sum / k,
    }
}

pub fn metrics(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Metrics {
    metrics_from_confusion(&confusion_matrix(y_true, y_pred, n_classes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: Metrics,
    pub confusion: Vec<Vec<usize>>,
    pub params: ModelParams,
    /// Columns imputed with 0 because every training row lacked them.
    pub imputation_warnings: Vec<String>,
    pub converged: bool,
    pub search: Option<SearchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    pub k: usize,
    pub seed: u64,
    pub n_rows: usize,
    pub features: Vec<String>,
    pub folds: Vec<FoldReport>,
    /// Unweighted mean of the per-fold metrics.
    pub aggregate: Metrics,
    /// Sum of the per-fold confusion matrices.
    pub confusion: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tuning {
    Fixed(ModelParams),
    /// Nested search on each outer training split.
    Search {
        kind: super::model::ModelKind,
        budget: usize,
    },
}

/// Train on each training split (imputation fitted there too) and score the held-out fold.
pub fn cross_validate(
    matrix: &FeatureMatrix,
    tuning: Tuning,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let labels = matrix.labels();
    let folds = stratified_kfold(&labels, ReadingLevel::COUNT, k, seed)?;
    let fold_reports = (0..k)
        .into_par_iter()
        .map(|f| run_fold(matrix, &labels, &folds, f, tuning, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut confusion = vec![vec![0; ReadingLevel::COUNT]; ReadingLevel::COUNT];
    for fr in &fold_reports {
        for (row, add) in confusion.iter_mut().zip(&fr.confusion) {
            for (a, b) in row.iter_mut().zip(add) {
                *a += b;
            }
        }
    }
    let n = k as f64;
    let mean = |g: fn(&Metrics) -> f64| fold_reports.iter().map(|f| g(&f.metrics)).sum::<f64>() / n;
    let aggregate = Metrics {
        accuracy: mean(|m| m.accuracy),
        macro_precision: mean(|m| m.macro_precision),
        macro_recall: mean(|m| m.macro_recall),
        macro_f1: mean(|m| m.macro_f1),
    };
    Ok(EvaluationReport {
        model: match tuning {
            Tuning::Fixed(p) => p.kind().to_string(),
            Tuning::Search { kind, .. } => kind.to_string(),
        },
        k,
        seed,
        n_rows: matrix.rows.len(),
        features: matrix.schema.names().map(str::to_string).collect(),
        folds: fold_reports,
        aggregate,
        confusion,
    })
}

fn run_fold(
    matrix: &FeatureMatrix,
    labels: &[usize],
    folds: &[usize],
    f: usize,
    tuning: Tuning,
    seed: u64,
) -> Result<FoldReport> {
    let train_idx: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] != f).collect();
    let test_idx: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] == f).collect();
    let train = matrix.subset(&train_idx);
    let test = matrix.subset(&test_idx);
    let (params, search) = match tuning {
        Tuning::Fixed(p) => (p, None),
        Tuning::Search { kind, budget } => {
            let s = hyperparameter_search(&train, kind, budget, seed)?;
            (s.best, Some(s))
        }
    };
    let (imputer, imputation_warnings) = Imputer::fit(&train);
    let x_train = imputer.apply(&train);
    let y_train = train.labels();
    let model = params.fit(&x_train, &y_train, seed)?;
    let y_test = test.labels();
    let y_pred: Vec<usize> = imputer
        .apply(&test)
        .iter()
        .map(|x| model.predict(x))
        .collect();
    let confusion = confusion_matrix(&y_test, &y_pred, ReadingLevel::COUNT);
    Ok(FoldReport {
        fold: f,
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        metrics: metrics_from_confusion(&confusion),
        confusion,
        params,
        imputation_warnings,
        converged: !model.did_not_converge(),
        search,
    })
}

/// Mean held-out accuracy of fixed params, used to score search candidates.
pub fn cv_accuracy(
    matrix: &FeatureMatrix,
    params: &ModelParams,
    k: usize,
    seed: u64,
) -> Result<f64> {
    Ok(cross_validate(matrix, Tuning::Fixed(*params), k, seed)?
        .aggregate
        .accuracy)
}

impl EvaluationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "model: {}  k: {}  seed: {}  rows: {}  features: {}\n\n",
            self.model,
            self.k,
            self.seed,
            self.n_rows,
            self.features.len()
        ));
        s.push_str(&format!(
            "{:>6} {:>7} {:>6} {:>9} {:>9} {:>9} {:>9}\n",
            "fold", "train", "test", "accuracy", "macro_P", "macro_R", "macro_F1"
        ));
        let line = |s: &mut String, label: &str, tr: String, te: String, m: &Metrics| {
            s.push_str(&format!(
                "{:>6} {:>7} {:>6} {:>9.4} {:>9.4} {:>9.4} {:>9.4}\n",
                label, tr, te, m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1
            ));
        };
        for f in &self.folds {
            line(
                &mut s,
                &f.fold.to_string(),
                f.n_train.to_string(),
                f.n_test.to_string(),
                &f.metrics,
            );
        }
        line(
            &mut s,
            "mean",
            String::new(),
            String::new(),
            &self.aggregate,
        );
        s.push_str("\nconfusion (rows true, columns predicted):\n");
        s.push_str(&format!("{:>6}", ""));
        for l in ReadingLevel::ALL {
            s.push_str(&format!(" {:>6}", l.code()));
        }
        s.push('\n');
        for (l, row) in ReadingLevel::ALL.iter().zip(&self.confusion) {
            s.push_str(&format!("{:>6}", l.code()));
            for v in row {
                s.push_str(&format!(" {v:>6}"));
            }
            s.push('\n');
        }
        s
    }
}
