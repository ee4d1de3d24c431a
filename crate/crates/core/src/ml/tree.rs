//! CART decision trees and a bagged random forest with impurity importances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Entropy,
    Gini,
}

/// What a tree predicts.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Classes { labels: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

#[derive(Clone, Debug)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features tried per split; `None` means all.
    pub max_features: Option<usize>,
    pub criterion: Criterion,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: usize::MAX,
            min_samples_split: 2,
            max_features: None,
            criterion: Criterion::Entropy,
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    /// Total weighted impurity decrease per feature (unnormalised).
    pub importances: Vec<f64>,
}

struct Builder<'a> {
    x: &'a Matrix,
    target: Target<'a>,
    params: &'a TreeParams,
    total: f64,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

fn class_impurity(counts: &[usize], n: usize, criterion: Criterion) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    match criterion {
        Criterion::Entropy => counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.ln()
            })
            .sum(),
        Criterion::Gini => 1.0 - counts.iter().map(|&c| (c as f64 / nf).powi(2)).sum::<f64>(),
    }
}

fn variance(sum: f64, sum_sq: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (sum_sq / nf - (sum / nf).powi(2)).max(0.0)
}

impl<'a> Builder<'a> {
    fn impurity(&self, idx: &[usize]) -> f64 {
        match self.target {
            Target::Classes { labels, n_classes } => {
                let mut counts = vec![0; n_classes];
                for &i in idx {
                    counts[labels[i]] += 1;
                }
                class_impurity(&counts, idx.len(), self.params.criterion)
            }
            Target::Values(v) => {
                let (s, s2) = idx.iter().fold((0.0, 0.0), |(s, s2), &i| (s + v[i], s2 + v[i] * v[i]));
                variance(s, s2, idx.len())
            }
        }
    }

    fn leaf_value(&self, idx: &[usize]) -> f64 {
        match self.target {
            Target::Classes { labels, n_classes } => {
                let mut counts = vec![0usize; n_classes];
                for &i in idx {
                    counts[labels[i]] += 1;
                }
                let mut best = 0;
                for (c, &n) in counts.iter().enumerate() {
                    if n > counts[best] {
                        best = c;
                    }
                }
                best as f64
            }
            Target::Values(v) => idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64,
        }
    }

    /// Best (weighted child impurity, threshold) for one feature.
    fn best_split(&self, idx: &mut [usize], f: usize) -> Option<(f64, f64)> {
        let x = self.x;
        idx.sort_unstable_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)));
        let n = idx.len();
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |pos: usize, score: f64| {
            let (a, b) = (x.get(idx[pos - 1], f), x.get(idx[pos], f));
            if a < b && best.map_or(true, |(s, _)| score < s) {
                let mut thr = a + (b - a) / 2.0;
                if thr >= b {
                    thr = a;
                }
                best = Some((score, thr));
            }
        };
        match self.target {
            Target::Classes { labels, n_classes } => {
                let mut left = vec![0usize; n_classes];
                let mut right = vec![0usize; n_classes];
                for &i in idx.iter() {
                    right[labels[i]] += 1;
                }
                for pos in 1..n {
                    let c = labels[idx[pos - 1]];
                    left[c] += 1;
                    right[c] -= 1;
                    let score = pos as f64 * class_impurity(&left, pos, self.params.criterion)
                        + (n - pos) as f64 * class_impurity(&right, n - pos, self.params.criterion);
                    consider(pos, score);
                }
            }
            Target::Values(v) => {
                let (ts, ts2) = idx.iter().fold((0.0, 0.0), |(s, s2), &i| (s + v[i], s2 + v[i] * v[i]));
                let (mut ls, mut ls2) = (0.0, 0.0);
                for pos in 1..n {
                    let y = v[idx[pos - 1]];
                    ls += y;
                    ls2 += y * y;
                    let score = pos as f64 * variance(ls, ls2, pos)
                        + (n - pos) as f64 * variance(ts - ls, ts2 - ls2, n - pos);
                    consider(pos, score);
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: &mut Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(self.leaf_value(idx)));
        let imp = self.impurity(idx);
        if depth >= self.params.max_depth || idx.len() < self.params.min_samples_split || imp <= 1e-12 {
            return id;
        }
        let p = self.x.cols();
        let features: Vec<usize> = match self.params.max_features {
            Some(m) if m < p => {
                let mut f = sample(rng, p, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        };
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            if let Some((score, thr)) = self.best_split(idx, f) {
                if best.map_or(true, |(s, _, _)| score < s) {
                    best = Some((score, f, thr));
                }
            }
        }
        let Some((score, feature, threshold)) = best else {
            return id;
        };
        let n = idx.len() as f64;
        let decrease = n * imp - score;
        if decrease <= 1e-12 * n {
            return id;
        }
        self.importances[feature] += decrease / self.total;
        let (mut l, mut r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x.get(i, feature) <= threshold);
        let left = self.grow(&mut l, depth + 1, rng);
        let right = self.grow(&mut r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// Fits on the rows `idx` of `x` (duplicates allowed, as in bootstrap samples).
    pub fn fit(x: &Matrix, idx: &[usize], target: Target, params: &TreeParams, rng: &mut ChaCha8Rng) -> DecisionTree {
        let mut b = Builder {
            x,
            target,
            params,
            total: idx.len().max(1) as f64,
            nodes: Vec::new(),
            importances: vec![0.0; x.cols()],
        };
        let mut idx = idx.to_vec();
        b.grow(&mut idx, 0, rng);
        DecisionTree {
            nodes: b.nodes,
            importances: b.importances,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Clone, Debug)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    classes: Option<usize>,
    /// Mean of per-tree importances, each normalised to sum to one.
    pub importances: Vec<f64>,
}

impl RandomForest {
    pub fn fit(x: &Matrix, idx: &[usize], target: Target, n_trees: usize, max_depth: usize, seed: u64) -> RandomForest {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = x.cols();
        let (classes, max_features) = match target {
            Target::Classes { n_classes, .. } => (Some(n_classes), ((p as f64).sqrt().round() as usize).max(1)),
            Target::Values(_) => (None, p),
        };
        let params = TreeParams {
            max_depth,
            min_samples_split: 2,
            max_features: Some(max_features),
            criterion: Criterion::Gini,
        };
        let mut importances = vec![0.0; p];
        let mut trees = Vec::with_capacity(n_trees);
        for _ in 0..n_trees {
            let boot: Vec<usize> = (0..idx.len()).map(|_| idx[rng.gen_range(0..idx.len())]).collect();
            let tree = DecisionTree::fit(x, &boot, target, &params, &mut rng);
            let total: f64 = tree.importances.iter().sum();
            if total > 0.0 {
                for (acc, v) in importances.iter_mut().zip(&tree.importances) {
                    *acc += v / total;
                }
            }
            trees.push(tree);
        }
        for v in importances.iter_mut() {
            *v /= n_trees.max(1) as f64;
        }
        RandomForest {
            trees,
            classes,
            importances,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self.classes {
            Some(k) => {
                let mut votes = vec![0usize; k];
                for t in &self.trees {
                    votes[t.predict_row(row) as usize] += 1;
                }
                let mut best = 0;
                for (c, &v) in votes.iter().enumerate() {
                    if v > votes[best] {
                        best = c;
                    }
                }
                best as f64
            }
            None => self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_ten_classes_at_depth_four() {
        let x = Matrix::new(1000, 1, (0..1000).map(|i| (i % 10) as f64).collect()).unwrap();
        let labels: Vec<usize> = (0..1000).map(|i| i % 10).collect();
        let idx: Vec<usize> = (0..1000).collect();
        let params = TreeParams {
            max_depth: 4,
            ..TreeParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = DecisionTree::fit(&x, &idx, Target::Classes { labels: &labels, n_classes: 10 }, &params, &mut rng);
        let hits = (0..1000).filter(|&i| t.predict_row(x.row(i)) as usize == labels[i]).count();
        assert_eq!(hits, 1000);
        assert!(t.depth() <= 4);
    }

    #[test]
    fn regression_importance_goes_to_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows: Vec<Vec<f64>> = (0..500).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[1] * 3.0).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let idx: Vec<usize> = (0..500).collect();
        let f = RandomForest::fit(&x, &idx, Target::Values(&y), 10, 6, 2);
        assert!(f.importances[1] > 0.9);
        assert!((f.predict_row(&[0.5, 0.5]) - 1.5).abs() < 0.2);
    }
}
