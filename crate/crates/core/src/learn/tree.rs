//! CART classification tree with Gini impurity.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Splits must beat the incumbent by more than this to replace it, which keeps
/// the first (lowest feature, lowest threshold) candidate on float ties.
pub const SPLIT_EPS: f64 = 1e-12;

pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
        /// n_node * gini(node) - n_left * gini(left) - n_right * gini(right).
        weighted_decrease: f64,
    },
    Leaf {
        counts: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Features tried per node; `None` means all.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            mtry: None,
            min_leaf: 1,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_features: usize,
    pub n_classes: usize,
    /// Pre-order; the root is node 0.
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit {
    pub feature: usize,
    pub threshold: f64,
    pub decrease: f64,
}

struct Builder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Grow a tree on the rows listed in `sample` (repeats allowed, as in a bootstrap).
    pub fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[usize],
        sample: &[usize],
        n_classes: usize,
        params: TreeParams,
        rng: &mut R,
    ) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Training("cannot grow a tree on zero rows".into()));
        }
        if params.min_leaf == 0 {
            return Err(Error::Training("min_leaf must be >= 1".into()));
        }
        let n_features = x[sample[0]].len();
        if params.mtry == Some(0) || params.mtry.is_some_and(|m| m > n_features) {
            return Err(Error::Training(format!("mtry must be in 1..={n_features}")));
        }
        let mut b = Builder {
            x,
            y,
            n_classes,
            params,
            rng,
            nodes: Vec::new(),
        };
        let mut rows = sample.to_vec();
        b.grow(&mut rows, 0);
        Ok(DecisionTree {
            n_features,
            n_classes,
            nodes: b.nodes,
        })
    }

    pub fn leaf_counts(&self, x: &[f64]) -> &[usize] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    /// Majority class of the reached leaf; ties go to the lowest class.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax_first(self.leaf_counts(x))
    }

    pub fn depth(&self) -> usize {
        fn d(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + d(nodes, *left).max(d(nodes, *right)),
            }
        }
        d(&self.nodes, 0)
    }

    pub fn n_splits(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }

    /// Per-feature impurity decrease, weighted by the share of root samples reaching each node.
    pub fn impurity_decrease(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        let root_n = match &self.nodes[0] {
            Node::Split { n_samples, .. } => *n_samples as f64,
            Node::Leaf { .. } => return out,
        };
        for node in &self.nodes {
            if let Node::Split {
                feature,
                weighted_decrease,
                ..
            } = node
            {
                out[*feature] += weighted_decrease / root_n;
            }
        }
        out
    }
}

pub(crate) fn argmax_first<T: PartialOrd + Copy>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn class_counts(y: &[usize], rows: &[usize], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    for &r in rows {
        c[y[r]] += 1;
    }
    c
}

/// Best Gini split of `rows` over `features` (ascending). Children must hold
/// at least `min_leaf` rows. Returns `None` when no split lowers impurity.
pub fn best_split(
    x: &[Vec<f64>],
    y: &[usize],
    rows: &[usize],
    features: &[usize],
    n_classes: usize,
    min_leaf: usize,
) -> Option<BestSplit> {
    let n = rows.len();
    let parent = class_counts(y, rows, n_classes);
    let parent_impurity = n as f64 * gini(&parent);
    let mut best: Option<BestSplit> = None;
    let mut order = rows.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
        let mut left = vec![0usize; n_classes];
        let mut right = parent.clone();
        for i in 0..n - 1 {
            let c = y[order[i]];
            left[c] += 1;
            right[c] -= 1;
            let lo = x[order[i]][f];
            let hi = x[order[i + 1]][f];
            if lo == hi {
                continue;
            }
            let nl = i + 1;
            let nr = n - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let decrease = parent_impurity - nl as f64 * gini(&left) - nr as f64 * gini(&right);
            let current = best.map_or(0.0, |b| b.decrease);
            if decrease > current + SPLIT_EPS {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(BestSplit {
                    feature: f,
                    threshold,
                    decrease,
                });
            }
        }
    }
    best
}

impl<R: Rng> Builder<'_, R> {
    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = class_counts(self.y, rows, self.n_classes);
        self.nodes.push(Node::Leaf {
            counts: counts.clone(),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < 2 * self.params.min_leaf {
            return id;
        }
        let features = self.candidate_features(rows);
        let Some(split) = best_split(
            self.x,
            self.y,
            rows,
            &features,
            self.n_classes,
            self.params.min_leaf,
        ) else {
            return id;
        };
        let (x, f, t) = (self.x, split.feature, split.threshold);
        rows.sort_by(|&a, &b| (x[a][f] > t).cmp(&(x[b][f] > t)));
        let mid = rows.iter().position(|&r| x[r][f] > t).unwrap_or(rows.len());
        let (l, r) = rows.split_at_mut(mid);
        let n_samples = l.len() + r.len();
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: f,
            threshold: t,
            left,
            right,
            n_samples,
            weighted_decrease: split.decrease,
        };
        id
    }

    /// Draw `mtry` features among those not constant on this node, ascending.
    fn candidate_features(&mut self, rows: &[usize]) -> Vec<usize> {
        let p = self.x[rows[0]].len();
        let varying: Vec<usize> = (0..p)
            .filter(|&f| {
                let v = self.x[rows[0]][f];
                rows.iter().any(|&r| self.x[r][f] != v)
            })
            .collect();
        let m = self.params.mtry.unwrap_or(p).min(varying.len());
        if m == varying.len() {
            return varying;
        }
        let mut picked: Vec<usize> = index::sample(self.rng, varying.len(), m)
            .into_iter()
            .map(|i| varying[i])
            .collect();
        picked.sort_unstable();
        picked
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fit_all(x: &[Vec<f64>], y: &[usize], k: usize) -> DecisionTree {
        let sample: Vec<usize> = (0..y.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        DecisionTree::fit(x, y, &sample, k, TreeParams::default(), &mut rng).unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 5]), 0.5);
        assert_eq!(gini(&[7, 0, 0]), 0.0);
        assert!((gini(&[1, 1, 1]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_split() {
        let x: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0]
            .iter()
            .map(|&v| vec![v, 0.0])
            .collect();
        let y = vec![0, 0, 0, 1, 1, 1];
        let t = fit_all(&x, &y, 2);
        assert_eq!(t.n_splits(), 1);
        match &t.nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 6.5);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(t.impurity_decrease(), vec![0.5, 0.0]);
        assert_eq!(t.predict(&[6.5, 0.0]), 0);
        assert_eq!(t.predict(&[6.6, 0.0]), 1);
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // both features separate the classes perfectly
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let t = fit_all(&x, &[0, 1], 2);
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn min_leaf_and_depth() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let sample: Vec<usize> = (0..8).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = DecisionTree::fit(
            &x,
            &y,
            &sample,
            2,
            TreeParams {
                mtry: None,
                min_leaf: 1,
                max_depth: Some(2),
            },
            &mut rng,
        )
        .unwrap();
        assert!(t.depth() <= 2);
        let t = DecisionTree::fit(
            &x,
            &y,
            &sample,
            2,
            TreeParams {
                mtry: None,
                min_leaf: 3,
                max_depth: None,
            },
            &mut rng,
        )
        .unwrap();
        fn check(t: &DecisionTree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { counts } => {
                    let n: usize = counts.iter().sum();
                    assert!(n >= 3);
                    n
                }
                Node::Split {
                    left,
                    right,
                    n_samples,
                    ..
                } => {
                    let n = check(t, *left) + check(t, *right);
                    assert_eq!(n, *n_samples);
                    n
                }
            }
        }
        check(&t, 0);
    }

    #[test]
    fn constant_features_give_a_leaf() {
        let x = vec![vec![1.0]; 4];
        let t = fit_all(&x, &[0, 1, 0, 1], 2);
        assert_eq!(t.nodes, vec![Node::Leaf { counts: vec![2, 2] }]);
        assert_eq!(t.predict(&[1.0]), 0);
    }
}
