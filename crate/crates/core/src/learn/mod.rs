//! Classifiers, cross-validation, search and feature analysis.

pub mod analysis;
pub mod cv;
pub mod forest;
pub mod logreg;
pub mod model;
pub mod search;
pub mod tree;

pub use analysis::{
    average_ranks, mdi_importance, pearson, permutation_importance, spearman, spearman_correlation,
    CorrelationReport, ImportanceMethod, ImportanceReport,
};
pub use cv::{cross_validate, metrics, stratified_kfold, EvaluationReport, Metrics, Tuning};
pub use forest::{ForestParams, RandomForest};
pub use logreg::{loss_and_gradient, LogRegParams, LogisticRegression};
pub use model::{Model, ModelFile, ModelKind, ModelParams};
pub use search::{hyperparameter_search, SearchResult};
pub use tree::{gini, DecisionTree, Node, TreeParams};
