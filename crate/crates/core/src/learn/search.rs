//! Two-stage hyperparameter search: random sampling, then a ±1 step grid
//! around the best sample. Candidates are scored by inner cross-validation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cv::cv_accuracy;
use super::forest::ForestParams;
use super::logreg::LogRegParams;
use super::model::{ModelKind, ModelParams};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

pub const INNER_FOLDS: usize = 3;

pub const RF_TREES: (usize, usize, usize) = (100, 1000, 100);
pub const RF_MIN_LEAF: (usize, usize) = (1, 10);
pub const LOGREG_LOG10_LAMBDA: (f64, f64, f64) = (-4.0, 1.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Random,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub stage: Stage,
    pub params: ModelParams,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: ModelParams,
    pub best_score: f64,
    pub inner_folds: usize,
    pub seed: u64,
    pub trace: Vec<TraceEntry>,
}

fn sample(kind: ModelKind, p: usize, rng: &mut ChaCha8Rng) -> ModelParams {
    match kind {
        ModelKind::Rf => {
            let (lo, hi, step) = RF_TREES;
            ModelParams::Rf(ForestParams {
                n_trees: rng.gen_range(lo / step..=hi / step) * step,
                mtry: Some(rng.gen_range(1..=p)),
                min_leaf: rng.gen_range(RF_MIN_LEAF.0..=RF_MIN_LEAF.1),
                max_depth: None,
            })
        }
        ModelKind::Logreg => {
            let (lo, hi, _) = LOGREG_LOG10_LAMBDA;
            ModelParams::Logreg(LogRegParams {
                l2_lambda: 10f64.powf(rng.gen_range(lo..=hi)),
                ..Default::default()
            })
        }
    }
}

fn steps_usize(v: usize, step: usize, lo: usize, hi: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if v >= lo + step {
        out.push(v - step);
    }
    out.push(v);
    if v + step <= hi {
        out.push(v + step);
    }
    out
}

/// The ±1 step neighbourhood of `center`, clipped to the space, center included.
pub fn grid_around(center: &ModelParams, p: usize) -> Vec<ModelParams> {
    match center {
        ModelParams::Rf(c) => {
            let mut out = Vec::new();
            let mtry = c.mtry.unwrap_or(1);
            for n_trees in steps_usize(c.n_trees, RF_TREES.2, RF_TREES.0, RF_TREES.1) {
                for m in steps_usize(mtry, 1, 1, p) {
                    for min_leaf in steps_usize(c.min_leaf, 1, RF_MIN_LEAF.0, RF_MIN_LEAF.1) {
                        out.push(ModelParams::Rf(ForestParams {
                            n_trees,
                            mtry: Some(m),
                            min_leaf,
                            max_depth: c.max_depth,
                        }));
                    }
                }
            }
            out
        }
        ModelParams::Logreg(c) => {
            let (lo, hi, step) = LOGREG_LOG10_LAMBDA;
            let e = c.l2_lambda.log10();
            [e - step, e, e + step]
                .into_iter()
                .filter(|x| (lo - 1e-9..=hi + 1e-9).contains(x))
                .map(|x| {
                    ModelParams::Logreg(LogRegParams {
                        l2_lambda: if x == e { c.l2_lambda } else { 10f64.powf(x) },
                        ..*c
                    })
                })
                .collect()
        }
    }
}

/// Random stage of `budget` samples, then the grid around the random-stage
/// best. Candidates already scored are not re-run. The best entry is the
/// first one in the trace with the highest score.
pub fn hyperparameter_search(
    matrix: &FeatureMatrix,
    kind: ModelKind,
    budget: usize,
    seed: u64,
) -> Result<SearchResult> {
    let p = matrix.n_features();
    if p == 0 {
        return Err(Error::InvalidArgument(
            "search space is empty: matrix has no features".into(),
        ));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("search budget must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace: Vec<TraceEntry> = Vec::new();
    let score = |params: &ModelParams| cv_accuracy(matrix, params, INNER_FOLDS, seed);

    for _ in 0..budget {
        let params = sample(kind, p, &mut rng);
        let s = score(&params)?;
        trace.push(TraceEntry {
            stage: Stage::Random,
            params,
            score: s,
        });
    }
    let center = best_of(&trace).params;
    for params in grid_around(&center, p) {
        if trace.iter().any(|t| t.params == params) {
            continue;
        }
        let s = score(&params)?;
        trace.push(TraceEntry {
            stage: Stage::Grid,
            params,
            score: s,
        });
    }
    let best = best_of(&trace);
    Ok(SearchResult {
        best: best.params,
        best_score: best.score,
        inner_folds: INNER_FOLDS,
        seed,
        trace,
    })
}

fn best_of(trace: &[TraceEntry]) -> &TraceEntry {
    let mut best = &trace[0];
    for t in &trace[1..] {
        if t.score > best.score {
            best = t;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ReadingLevel;
    use crate::matrix::{FeatureGroup, FeatureSchema, FeatureSpec, MatrixRow};

    fn toy() -> FeatureMatrix {
        let schema = FeatureSchema::new(vec![
            FeatureSpec::new(FeatureGroup::Trad, "a"),
            FeatureSpec::new(FeatureGroup::Trad, "b"),
        ])
        .unwrap();
        let rows = (0..18)
            .map(|i| MatrixRow {
                doc_id: format!("d{i}"),
                level: ReadingLevel::from_ordinal(i % 3).unwrap(),
                values: vec![(i % 3) as f64 + 0.1 * (i / 3) as f64, (i * 7 % 5) as f64],
                absent: vec![false, false],
            })
            .collect();
        FeatureMatrix { schema, rows }
    }

    #[test]
    fn grid_sizes() {
        let c = ModelParams::Rf(ForestParams {
            n_trees: 100,
            mtry: Some(1),
            min_leaf: 5,
            max_depth: None,
        });
        // n_trees {100,200} x mtry {1,2} x min_leaf {4,5,6}
        assert_eq!(grid_around(&c, 2).len(), 12);
        let c = ModelParams::Logreg(LogRegParams {
            l2_lambda: 10.0,
            ..Default::default()
        });
        assert_eq!(grid_around(&c, 2).len(), 2);
    }

    #[test]
    fn budget_one_centers_grid_on_the_sample() {
        let r = hyperparameter_search(&toy(), ModelKind::Logreg, 1, 4).unwrap();
        assert_eq!(r.trace[0].stage, Stage::Random);
        let grid = grid_around(&r.trace[0].params, 2);
        assert_eq!(r.trace.len(), grid.len());
        assert!(r.trace.iter().all(|t| t.score <= r.best_score));
        let again = hyperparameter_search(&toy(), ModelKind::Logreg, 1, 4).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn rf_search_is_within_space() {
        let r = hyperparameter_search(&toy(), ModelKind::Rf, 2, 1).unwrap();
        for t in &r.trace {
            let ModelParams::Rf(p) = t.params else {
                panic!()
            };
            assert!((100..=1000).contains(&p.n_trees) && p.n_trees % 100 == 0);
            assert!((1..=2).contains(&p.mtry.unwrap()));
            assert!((1..=10).contains(&p.min_leaf));
        }
        assert!(hyperparameter_search(&toy(), ModelKind::Rf, 0, 1).is_err());
    }
}
