use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Samples with features, integer class labels and ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    class_names: Vec<String>,
    ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Matrix, labels: Vec<usize>, class_names: Vec<String>, ids: Vec<String>) -> Result<Self> {
        let n = features.rows();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
        }
        if ids.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ids.len() });
        }
        if class_names.len() < 2 {
            return Err(Error::Input(format!("C ≥ 2 required, got {} class(es)", class_names.len())));
        }
        if features.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("features contain non-finite values".into()));
        }
        let mut per_class = vec![0usize; class_names.len()];
        for &y in &labels {
            *per_class.get_mut(y).ok_or_else(|| Error::Input(format!("label {y} has no class name")))? += 1;
        }
        if let Some(c) = per_class.iter().position(|&k| k == 0) {
            return Err(Error::Input(format!("class '{}' has no samples", class_names[c])));
        }
        Ok(Self { features, labels, class_names, ids })
    }

    /// Builds a dataset from string labels; classes are the sorted distinct labels.
    pub fn from_named(features: Matrix, labels: &[String], ids: Vec<String>) -> Result<Self> {
        let mut names: Vec<String> = labels.to_vec();
        names.sort();
        names.dedup();
        let idx = labels.iter().map(|l| names.binary_search(l).expect("label present")).collect();
        Self::new(features, idx, names, ids)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.features.cols()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Rows `idx`, keeping the full class dictionary.
    pub(crate) fn rows(&self, idx: &[usize]) -> (Matrix, Vec<usize>) {
        let d = self.dims();
        let mut data = Vec::with_capacity(idx.len() * d);
        for &i in idx {
            data.extend_from_slice(self.features.row(i));
        }
        (Matrix::from_vec(idx.len(), d, data), idx.iter().map(|&i| self.labels[i]).collect())
    }
}

/// Per-feature centring and scaling learned from training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Features with zero spread; they map to 0 and carry no weight.
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let (n, d) = (x.rows(), x.cols());
        let mut mean = vec![0.0; d];
        let mut std = vec![1.0; d];
        let mut constant = vec![false; d];
        for c in 0..d {
            let first = if n > 0 { x.get(0, c) } else { 0.0 };
            if x.column(c).all(|v| v == first) {
                mean[c] = first;
                constant[c] = true;
                continue;
            }
            let mu = x.column(c).sum::<f64>() / n as f64;
            let var = x.column(c).map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
            mean[c] = mu;
            if var > 0.0 {
                std[c] = var.sqrt();
            } else {
                constant[c] = true;
            }
        }
        Self { mean, std, constant }
    }

    pub fn apply_row(&self, row: &[f64], out: &mut [f64]) {
        for c in 0..row.len() {
            out[c] = if self.constant[c] { 0.0 } else { (row[c] - self.mean[c]) / self.std[c] };
        }
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            self.apply_row(x.row(r), out.row_mut(r));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub lambda: f64,
    /// Stop once the gradient's Euclidean norm is at most
    /// `tolerance * max(1, |objective|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { lambda: 1.0, tolerance: 1e-6, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// C × D weights on standardized features.
    pub weights: Matrix,
    pub intercepts: Vec<f64>,
    pub standardizer: Standardizer,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Objective value after each accepted step, starting at the initial point.
    pub objective_trace: Vec<f64>,
}

impl TrainedModel {
    pub fn class_count(&self) -> usize {
        self.intercepts.len()
    }

    pub fn dims(&self) -> usize {
        self.weights.cols()
    }

    pub fn scores(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: features.len() });
        }
        let mut z = vec![0.0; features.len()];
        self.standardizer.apply_row(features, &mut z);
        Ok((0..self.class_count()).map(|c| self.intercepts[c] + dot(self.weights.row(c), &z)).collect())
    }
}

/// Class with the highest score; ties go to the smallest class id.
pub fn predict(model: &TrainedModel, features: &[f64]) -> Result<usize> {
    let scores = model.scores(features)?;
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    Ok(best)
}

pub fn fit(train: &LabeledDataset, opts: &FitOptions) -> Result<TrainedModel> {
    fit_rows(train.features(), train.labels(), train.class_count(), opts)
}

pub(crate) fn fit_rows(x: &Matrix, y: &[usize], classes: usize, opts: &FitOptions) -> Result<TrainedModel> {
    if !(opts.lambda > 0.0 && opts.lambda.is_finite()) {
        return Err(Error::Input(format!("lambda must be positive, got {}", opts.lambda)));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("features contain non-finite values".into()));
    }
    if x.rows() < classes {
        return Err(Error::Input(format!("{} training samples for {classes} classes", x.rows())));
    }
    if y.iter().any(|&c| c >= classes) {
        return Err(Error::Input("label outside the class dictionary".into()));
    }
    let standardizer = Standardizer::fit(x);
    let z = standardizer.apply(x);
    let d = x.cols();
    let problem = Problem { x: &z, y, classes, lambda: opts.lambda };

    let (theta, converged, iterations, gradient_norm, trace) = lbfgs(&problem, opts);
    let weights = Matrix::from_vec(classes, d, theta[..classes * d].to_vec());
    let intercepts = theta[classes * d..].to_vec();
    Ok(TrainedModel {
        weights,
        intercepts,
        standardizer,
        lambda: opts.lambda,
        converged,
        iterations,
        gradient_norm,
        objective_trace: trace,
    })
}

struct Problem<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    classes: usize,
    lambda: f64,
}

/// Cross-entropy summed over samples plus `λ/2 ‖W‖²` (intercepts are not
/// penalized). `theta` holds W row-major followed by the intercepts.
pub(crate) fn objective_and_gradient(
    x: &Matrix,
    y: &[usize],
    classes: usize,
    lambda: f64,
    theta: &[f64],
    grad: &mut [f64],
) -> f64 {
    let d = x.cols();
    let (w, b) = theta.split_at(classes * d);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    let mut z = vec![0.0; classes];
    for i in 0..x.rows() {
        let row = x.row(i);
        for c in 0..classes {
            z[c] = b[c] + dot(&w[c * d..(c + 1) * d], row);
        }
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - z[y[i]];
        for c in 0..classes {
            let p = (z[c] - lse).exp();
            let r = p - if c == y[i] { 1.0 } else { 0.0 };
            let gw = &mut grad[c * d..(c + 1) * d];
            for (g, &v) in gw.iter_mut().zip(row) {
                *g += r * v;
            }
            grad[classes * d + c] += r;
        }
    }
    let mut penalty = 0.0;
    for (k, &v) in w.iter().enumerate() {
        penalty += v * v;
        grad[k] += lambda * v;
    }
    loss + 0.5 * lambda * penalty
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

type LbfgsOutcome = (Vec<f64>, bool, usize, f64, Vec<f64>);

/// Limited-memory BFGS with Armijo backtracking, started from zero.
fn lbfgs(p: &Problem<'_>, opts: &FitOptions) -> LbfgsOutcome {
    const MEMORY: usize = 10;
    let dim = p.classes * p.x.cols() + p.classes;
    let eval = |theta: &[f64], g: &mut [f64]| objective_and_gradient(p.x, p.y, p.classes, p.lambda, theta, g);

    let mut theta = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut f = eval(&theta, &mut grad);
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut next = vec![0.0; dim];
    let mut next_grad = vec![0.0; dim];

    let small = |gnorm: f64, f: f64| gnorm <= opts.tolerance * f.abs().max(1.0);

    for iter in 0..opts.max_iterations {
        let gnorm = norm(&grad);
        if small(gnorm, f) {
            return (theta, true, iter, gnorm, trace);
        }

        // two-loop recursion
        let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, yv, rho) in history.iter().rev() {
            let a = rho * dot(s, &dir);
            for (d, yk) in dir.iter_mut().zip(yv) {
                *d -= a * yk;
            }
            alphas.push(a);
        }
        let gamma = match history.back() {
            Some((s, yv, _)) => dot(s, yv) / dot(yv, yv),
            None => 1.0 / gnorm.max(1.0),
        };
        dir.iter_mut().for_each(|d| *d *= gamma);
        for ((s, yv, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let beta = rho * dot(yv, &dir);
            for (d, sk) in dir.iter_mut().zip(s) {
                *d += (a - beta) * sk;
            }
        }
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            history.clear();
            dir = grad.iter().map(|g| -g / gnorm.max(1.0)).collect();
            slope = dot(&grad, &dir);
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut f_next = f;
        while step > 1e-20 {
            for k in 0..dim {
                next[k] = theta[k] + step * dir[k];
            }
            f_next = eval(&next, &mut next_grad);
            if f_next <= f + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || f_next > f {
            log::debug!("line search stalled at iteration {iter}, gradient norm {gnorm:e}");
            return (theta, false, iter, gnorm, trace);
        }

        let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * norm(&s) * norm(&yv) {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        let stagnant = f - f_next <= 4.0 * f64::EPSILON * f.abs().max(1.0);
        std::mem::swap(&mut theta, &mut next);
        std::mem::swap(&mut grad, &mut next_grad);
        f = f_next;
        trace.push(f);
        if stagnant {
            let gnorm = norm(&grad);
            log::debug!("objective stagnant at iteration {iter}, gradient norm {gnorm:e}");
            return (theta, small(gnorm, f), iter + 1, gnorm, trace);
        }
    }
    let gnorm = norm(&grad);
    (theta, small(gnorm, f), opts.max_iterations, gnorm, trace)
}
