//! Random forest of bootstrapped CART trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{argmax_first, DecisionTree, TreeParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per node; `None` means floor(sqrt(p)).
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 500,
            mtry: None,
            min_leaf: 1,
            max_depth: None,
        }
    }
}

pub fn default_mtry(p: usize) -> usize {
    ((p as f64).sqrt().floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_trees: usize,
    pub mtry: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
    pub n_classes: usize,
    pub n_features: usize,
    pub trees: Vec<DecisionTree>,
}

pub(crate) fn check_training_set(x: &[Vec<f64>], y: &[usize], n_classes: usize) -> Result<usize> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Training(format!(
            "need matching non-empty rows and labels ({} rows, {} labels)",
            x.len(),
            y.len()
        )));
    }
    let p = x[0].len();
    if p == 0 {
        return Err(Error::Training("matrix has no feature columns".into()));
    }
    if let Some(i) = x.iter().position(|r| r.len() != p) {
        return Err(Error::Training(format!(
            "row {i} has {} values, expected {p}",
            x[i].len()
        )));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Training("matrix contains non-finite values".into()));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::Training(format!("label {c} out of range")));
    }
    let mut present = vec![false; n_classes];
    for &c in y {
        present[c] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::Training(
            "training data has fewer than two classes".into(),
        ));
    }
    Ok(p)
}

impl RandomForest {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Result<Self> {
        let p = check_training_set(x, y, n_classes)?;
        if params.n_trees == 0 {
            return Err(Error::Training("n_trees must be >= 1".into()));
        }
        let mtry = params.mtry.unwrap_or_else(|| default_mtry(p));
        if mtry == 0 || mtry > p {
            return Err(Error::Training(format!(
                "mtry must be in 1..={p}, got {mtry}"
            )));
        }
        let tree_params = TreeParams {
            mtry: Some(mtry),
            min_leaf: params.min_leaf,
            max_depth: params.max_depth,
        };
        let n = x.len();
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
                let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                DecisionTree::fit(x, y, &sample, n_classes, tree_params, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForest {
            n_trees: params.n_trees,
            mtry,
            min_leaf: params.min_leaf,
            max_depth: params.max_depth,
            seed,
            n_classes,
            n_features: p,
            trees,
        })
    }

    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let mut v = vec![0; self.n_classes];
        for t in &self.trees {
            v[t.predict(x)] += 1;
        }
        v
    }

    /// Fraction of trees voting for each class.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let n = self.trees.len() as f64;
        self.votes(x).into_iter().map(|v| v as f64 / n).collect()
    }

    /// Majority vote; ties go to the lowest class.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax_first(&self.votes(x))
    }

    /// Mean decrease in impurity per feature, normalized to sum 1.
    /// All zeros when no tree has a split.
    pub fn mdi(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.n_features];
        for t in &self.trees {
            for (acc, d) in total.iter_mut().zip(t.impurity_decrease()) {
                *acc += d;
            }
        }
        let n = self.trees.len() as f64;
        total.iter_mut().for_each(|v| *v /= n);
        let sum: f64 = total.iter().sum();
        if sum > 0.0 {
            total.iter_mut().for_each(|v| *v /= sum);
        }
        total
    }
}
