//! Multinomial logistic regression with an L2 penalty on the weights.

use serde::{Deserialize, Serialize};

use super::forest::check_training_set;
use super::tree::argmax_first;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    pub l2_lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            l2_lambda: 1.0,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
    pub final_loss: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub l2_lambda: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// classes x features, on standardized inputs.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    /// Classes seen in training; the others get probability 0.
    pub trained_classes: Vec<usize>,
    pub convergence: Convergence,
}

/// Loss and gradient for parameters laid out class-major as
/// `[w_0_0 .. w_0_{p-1}, b_0, w_1_0 .. b_1, ...]`.
///
/// loss = mean cross-entropy + lambda/2 * sum of squared weights (biases unpenalized).
pub fn loss_and_gradient(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    lambda: f64,
    theta: &[f64],
) -> (f64, Vec<f64>) {
    let p = x[0].len();
    let stride = p + 1;
    let n = x.len() as f64;
    let mut grad = vec![0.0; theta.len()];
    let mut loss = 0.0;
    let mut z = vec![0.0; n_classes];
    for (row, &label) in x.iter().zip(y) {
        for (k, zk) in z.iter_mut().enumerate() {
            let w = &theta[k * stride..k * stride + p];
            *zk = theta[k * stride + p] + w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
        }
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - z[label];
        for k in 0..n_classes {
            let pk = (z[k] - lse).exp();
            let r = (pk - if k == label { 1.0 } else { 0.0 }) / n;
            let g = &mut grad[k * stride..(k + 1) * stride];
            for (gj, xj) in g[..p].iter_mut().zip(row) {
                *gj += r * xj;
            }
            g[p] += r;
        }
    }
    loss /= n;
    for k in 0..n_classes {
        for j in 0..p {
            let w = theta[k * stride + j];
            loss += 0.5 * lambda * w * w;
            grad[k * stride + j] += lambda * w;
        }
    }
    (loss, grad)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn standardize_params(x: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let p = x[0].len();
    let n = x.len() as f64;
    let mut means = vec![0.0; p];
    for r in x {
        for (m, v) in means.iter_mut().zip(r) {
            *m += v / n;
        }
    }
    let mut stds = vec![0.0; p];
    for r in x {
        for ((s, v), m) in stds.iter_mut().zip(r).zip(&means) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut stds {
        *s = s.sqrt();
        if *s == 0.0 || !s.is_finite() {
            *s = 1.0;
        }
    }
    (means, stds)
}

impl LogisticRegression {
    /// Gradient descent with Barzilai-Borwein steps and Armijo backtracking.
    /// Stops when the gradient norm drops below `tol`; otherwise the model is
    /// returned with `convergence.converged == false`.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        params: &LogRegParams,
    ) -> Result<Self> {
        let p = check_training_set(x, y, n_classes)?;
        if !(params.l2_lambda >= 0.0 && params.l2_lambda.is_finite()) {
            return Err(Error::Training("l2_lambda must be finite and >= 0".into()));
        }
        let (means, stds) = standardize_params(x);
        let xs: Vec<Vec<f64>> = x.iter().map(|r| scale(r, &means, &stds)).collect();
        let lambda = params.l2_lambda;
        // an absent class would drive its unpenalized bias to -inf; fit the
        // softmax over the classes that occur
        let trained_classes: Vec<usize> = (0..n_classes).filter(|c| y.contains(c)).collect();
        let kk = trained_classes.len();
        let yk: Vec<usize> = y
            .iter()
            .map(|c| {
                trained_classes
                    .iter()
                    .position(|t| t == c)
                    .expect("present")
            })
            .collect();
        let f = |t: &[f64]| loss_and_gradient(&xs, &yk, kk, lambda, t);

        let mut theta = vec![0.0; kk * (p + 1)];
        let (mut loss, mut grad) = f(&theta);
        let mut step = 1.0;
        let mut iterations = 0;
        let mut gnorm = norm(&grad);
        while gnorm >= params.tol && iterations < params.max_iter {
            iterations += 1;
            let g2 = gnorm * gnorm;
            let mut t = step;
            let (next, next_loss, next_grad) = loop {
                let cand: Vec<f64> = theta.iter().zip(&grad).map(|(a, g)| a - t * g).collect();
                let (l, g) = f(&cand);
                if l <= loss - 1e-4 * t * g2 || t < 1e-20 {
                    break (cand, l, g);
                }
                t *= 0.5;
            };
            let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &yv);
            step = if sy > 0.0 {
                (dot(&s, &s) / sy).clamp(1e-10, 1e10)
            } else {
                1.0
            };
            theta = next;
            loss = next_loss;
            grad = next_grad;
            gnorm = norm(&grad);
        }
        let stride = p + 1;
        let mut weights = vec![vec![0.0; p]; n_classes];
        let mut bias = vec![0.0; n_classes];
        for (k, &c) in trained_classes.iter().enumerate() {
            weights[c] = theta[k * stride..k * stride + p].to_vec();
            bias[c] = theta[k * stride + p];
        }
        Ok(LogisticRegression {
            l2_lambda: lambda,
            means,
            stds,
            weights,
            bias,
            trained_classes,
            convergence: Convergence {
                converged: gnorm < params.tol,
                iterations,
                final_loss: loss,
                gradient_norm: gnorm,
            },
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let xs = scale(x, &self.means, &self.stds);
        let mut z = vec![f64::NEG_INFINITY; self.weights.len()];
        for &c in &self.trained_classes {
            z[c] = self.bias[c] + dot(&self.weights[c], &xs);
        }
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax_first(&self.predict_proba(x))
    }
}

fn scale(x: &[f64], means: &[f64], stds: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(means)
        .zip(stds)
        .map(|((v, m), s)| (v - m) / s)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinal_feature_is_separable() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i % 3) as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let m = LogisticRegression::fit(
            &x,
            &y,
            3,
            &LogRegParams {
                l2_lambda: 1e-3,
                ..Default::default()
            },
        )
        .unwrap();
        for (r, &c) in x.iter().zip(&y) {
            assert_eq!(m.predict(r), c);
        }
        let p = m.predict_proba(&x[0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn heavy_penalty_predicts_the_prior() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y: Vec<usize> = (0..20)
            .map(|i| if i < 11 { 1 } else { (i % 2) * 2 })
            .collect();
        let m = LogisticRegression::fit(
            &x,
            &y,
            3,
            &LogRegParams {
                l2_lambda: 1e8,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.weights.iter().flatten().all(|w| w.abs() < 1e-6));
        for r in &x {
            assert_eq!(m.predict(r), 1);
        }
    }

    #[test]
    fn constant_column_is_harmless() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![3.0, (i % 2) as f64]).collect();
        let y: Vec<usize> = (0..12).map(|i| i % 2).collect();
        let m = LogisticRegression::fit(&x, &y, 3, &LogRegParams::default()).unwrap();
        assert!(m.weights.iter().flatten().all(|w| w.is_finite()));
        assert_eq!(m.stds[0], 1.0);
        assert!(m.convergence.converged);
        // class 2 never occurs
        assert_eq!(m.trained_classes, vec![0, 1]);
        assert_eq!(m.predict_proba(&[3.0, 0.0])[2], 0.0);
    }

    #[test]
    fn max_iter_flags_non_convergence() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..12).map(|i| i / 4).collect();
        let m = LogisticRegression::fit(
            &x,
            &y,
            3,
            &LogRegParams {
                l2_lambda: 1e-4,
                max_iter: 1,
                tol: 1e-12,
            },
        )
        .unwrap();
        assert!(!m.convergence.converged);
        assert_eq!(m.convergence.iterations, 1);
    }
}
