//! Baseline disentanglement metrics: intervention-based (Z-diff, Z-min variance),
//! predictor-based (SAP, DCI) and information-based (MIG, MIG-sup, Modularity, DCIMIG).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, top_two, MiCache};
use crate::error::{Error, Result};
use crate::estimators::{bin_indices, discrete::labels, EstimatorChoice, QUANTIZE_BINS};
use crate::matrix::Matrix;
use crate::ml::lasso::Lasso;
use crate::ml::logistic::{Logistic, LogisticParams};
use crate::ml::tree::{Criterion, DecisionTree, RandomForest, Target, TreeParams};
use crate::ml::{accuracy, linear_r2, mean, r_squared, std_dev, train_test_split};
use crate::repr::{FactorKind, Representation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionConfig {
    pub votes: usize,
    pub subset_size: usize,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for InterventionConfig {
    fn default() -> Self {
        InterventionConfig {
            votes: 800,
            subset_size: 64,
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

/// Rows sharing each value of a factor. Continuous factors are grouped by
/// equal-width bins, since exact repeats have probability zero.
fn factor_groups(rep: &Representation, j: usize, column: &[f64]) -> Result<(Vec<u32>, Vec<Vec<usize>>)> {
    let keys = match rep.factor_kinds[j] {
        FactorKind::Discrete { .. } => labels(column),
        FactorKind::Continuous { .. } => bin_indices(column, QUANTIZE_BINS),
    };
    let size = keys.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut groups = vec![Vec::new(); size];
    for (r, &g) in keys.iter().enumerate() {
        groups[g as usize].push(r);
    }
    if groups.iter().filter(|g| !g.is_empty()).count() < 2 {
        return Err(Error::DegenerateFactor(j));
    }
    Ok((keys, groups))
}

fn check_intervention(cfg: &InterventionConfig) -> Result<usize> {
    if cfg.votes < 2 || cfg.subset_size < 1 || !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("invalid intervention configuration {cfg:?}")));
    }
    let n_train = ((cfg.votes as f64 * cfg.train_fraction).round() as usize).clamp(1, cfg.votes - 1);
    Ok(n_train)
}

/// Draws one vote: a factor index and `subset_size` rows that share its value.
fn draw_group<'g>(
    rng: &mut ChaCha8Rng,
    keys: &[Vec<u32>],
    groups: &'g [Vec<Vec<usize>>],
) -> (usize, &'g [usize]) {
    let j = rng.gen_range(0..keys.len());
    let anchor = rng.gen_range(0..keys[j].len());
    (j, &groups[j][keys[j][anchor] as usize])
}

/// Accuracy of a linear classifier predicting the fixed factor from mean absolute
/// code differences between pairs that share that factor.
pub fn zdiff(rep: &Representation, cfg: &InterventionConfig) -> Result<f64> {
    let n_train = check_intervention(cfg)?;
    let cache = MiCache::new(rep);
    let (keys, groups): (Vec<_>, Vec<_>) = (0..rep.k())
        .map(|j| factor_groups(rep, j, cache.factor(j)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = rep.d();
    let mut feats = Vec::with_capacity(cfg.votes);
    let mut labels = Vec::with_capacity(cfg.votes);
    for _ in 0..cfg.votes {
        let (j, group) = draw_group(&mut rng, &keys, &groups);
        let mut e = vec![0.0; d];
        for _ in 0..cfg.subset_size {
            let a = group[rng.gen_range(0..group.len())];
            let b = group[rng.gen_range(0..group.len())];
            for (i, acc) in e.iter_mut().enumerate() {
                *acc += (rep.codes.get(a, i) - rep.codes.get(b, i)).abs();
            }
        }
        e.iter_mut().for_each(|v| *v /= cfg.subset_size as f64);
        feats.push(e);
        labels.push(j);
    }
    let model = Logistic::fit(&feats[..n_train], &labels[..n_train], rep.k(), &LogisticParams::default());
    let pred: Vec<usize> = feats[n_train..].iter().map(|f| model.predict(f)).collect();
    Ok(accuracy(&labels[n_train..], &pred))
}

/// Majority-vote accuracy of mapping the lowest-variance (normalised) code to the fixed factor.
pub fn zminvar(rep: &Representation, cfg: &InterventionConfig) -> Result<f64> {
    let n_train = check_intervention(cfg)?;
    let cache = MiCache::new(rep);
    let (keys, groups): (Vec<_>, Vec<_>) = (0..rep.k())
        .map(|j| factor_groups(rep, j, cache.factor(j)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let d = rep.d();
    let scale: Vec<f64> = (0..d)
        .map(|i| {
            let sd = std_dev(cache.code(i));
            if sd > 0.0 {
                Ok(sd)
            } else {
                Err(Error::DegenerateCode(i))
            }
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut votes = Vec::with_capacity(cfg.votes);
    let mut sub = vec![0.0; cfg.subset_size];
    for _ in 0..cfg.votes {
        let (j, group) = draw_group(&mut rng, &keys, &groups);
        let rows: Vec<usize> = (0..cfg.subset_size)
            .map(|_| group[rng.gen_range(0..group.len())])
            .collect();
        let mut vars = vec![0.0; d];
        for (i, v) in vars.iter_mut().enumerate() {
            for (s, &r) in sub.iter_mut().zip(&rows) {
                *s = rep.codes.get(r, i) / scale[i];
            }
            let m = mean(&sub);
            *v = sub.iter().map(|x| (x - m).powi(2)).sum::<f64>() / sub.len() as f64;
        }
        let lowest = vars
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v < vars[best] { i } else { best });
        votes.push((lowest, j));
    }
    let mut table = vec![vec![0usize; rep.k()]; d];
    for &(code, factor) in &votes[..n_train] {
        table[code][factor] += 1;
    }
    let classifier: Vec<usize> = table
        .iter()
        .map(|row| row.iter().enumerate().fold(0, |b, (f, &c)| if c > row[b] { f } else { b }))
        .collect();
    let hits = votes[n_train..].iter().filter(|(c, f)| classifier[*c] == *f).count();
    Ok(hits as f64 / (votes.len() - n_train) as f64)
}

/// Mean gap between the two most informative codes per factor. Informativeness is
/// linear R² for continuous factors and held-out accuracy of a shallow tree for
/// discrete ones.
pub fn sap(rep: &Representation) -> Result<f64> {
    sap_seeded(rep, rep.seed)
}

pub fn sap_seeded(rep: &Representation, seed: u64) -> Result<f64> {
    if rep.n() < 10 {
        return Err(Error::TooFewSamples { needed: 10, got: rep.n() });
    }
    let cache = MiCache::new(rep);
    let (train, test) = train_test_split(rep.n(), 0.3, seed);
    let mut total = 0.0;
    for j in 0..rep.k() {
        let z = cache.factor(j);
        if z.iter().all(|v| *v == z[0]) {
            return Err(Error::DegenerateFactor(j));
        }
        let scores: Vec<f64> = (0..rep.d())
            .map(|i| match rep.factor_kinds[j] {
                FactorKind::Continuous { .. } => linear_r2(cache.code(i), z),
                FactorKind::Discrete { categories } => {
                    let y: Vec<usize> = z.iter().map(|v| *v as usize).collect();
                    let x = Matrix::new(rep.n(), 1, cache.code(i).to_vec()).expect("column shape");
                    let params = TreeParams {
                        max_depth: (categories as f64).log2().ceil() as usize,
                        criterion: Criterion::Entropy,
                        ..TreeParams::default()
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let target = Target::Classes { labels: &y, n_classes: categories as usize };
                    let tree = DecisionTree::fit(&x, &train, target, &params, &mut rng);
                    let pred: Vec<usize> = test.iter().map(|&r| tree.predict_row(x.row(r)) as usize).collect();
                    let truth: Vec<usize> = test.iter().map(|&r| y[r]).collect();
                    accuracy(&truth, &pred)
                }
            })
            .collect();
        let (_, first, second) = top_two(&scores);
        total += first - second;
    }
    Ok(total / rep.k() as f64)
}

fn check_entropies(h: &[f64], code: bool) -> Result<()> {
    for (i, v) in h.iter().enumerate() {
        if !(*v > 1e-12) {
            return Err(if code { Error::ZeroEntropyCode(i) } else { Error::ZeroEntropyFactor(i) });
        }
    }
    Ok(())
}

pub(crate) fn mig_gaps_cached(cache: &MiCache, choice: &EstimatorChoice) -> Result<Vec<f64>> {
    let h = cache.factor_entropies(choice)?;
    check_entropies(&h, false)?;
    let mi = cache.pairwise(choice)?;
    Ok((0..mi.cols())
        .map(|j| {
            let (_, first, second) = top_two(&mi.column(j));
            ((first - second) / h[j]).clamp(0.0, 1.0)
        })
        .collect())
}

pub(crate) fn mig_cached(cache: &MiCache, choice: &EstimatorChoice) -> Result<f64> {
    let gaps = mig_gaps_cached(cache, choice)?;
    Ok(gaps.iter().sum::<f64>() / gaps.len() as f64)
}

/// Normalised top-two MI gap of each factor; MIG is their mean.
pub fn mig_gaps(rep: &Representation, choice: &EstimatorChoice) -> Result<Vec<f64>> {
    mig_gaps_cached(&MiCache::new(rep), choice)
}

/// Mutual information gap, normalised by factor entropy.
pub fn mig(rep: &Representation, choice: &EstimatorChoice) -> Result<f64> {
    mig_cached(&MiCache::new(rep), choice)
}

pub(crate) fn mig_sup_cached(cache: &MiCache, choice: &EstimatorChoice) -> Result<f64> {
    let h = cache.code_entropies(choice)?;
    check_entropies(&h, true)?;
    let mi = cache.pairwise(choice)?;
    let d = mi.rows();
    let total: f64 = (0..d)
        .map(|i| {
            let (_, first, second) = top_two(mi.row(i));
            ((first - second) / h[i]).clamp(0.0, 1.0)
        })
        .sum();
    Ok(total / d as f64)
}

/// Per-code MI gap, normalised by code entropy.
pub fn mig_sup(rep: &Representation, choice: &EstimatorChoice) -> Result<f64> {
    mig_sup_cached(&MiCache::new(rep), choice)
}

pub(crate) fn modularity_cached(cache: &MiCache, choice: &EstimatorChoice) -> Result<f64> {
    let mi = cache.pairwise(choice)?;
    let (d, k) = (mi.rows(), mi.cols());
    let mut total = 0.0;
    for i in 0..d {
        let row = mi.row(i);
        let best = argmax(row);
        let top = row[best];
        if !(top > 0.0) {
            return Err(Error::ZeroMaxMi(i));
        }
        if k == 1 {
            total += 1.0;
            continue;
        }
        let dev: f64 = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != best)
            .map(|(_, v)| v * v)
            .sum();
        total += 1.0 - dev / (top * top * (k - 1) as f64);
    }
    Ok((total / d as f64).clamp(0.0, 1.0))
}

/// Modularity: one minus the normalised squared deviation from an ideal single-factor code.
pub fn modularity_score(rep: &Representation, choice: &EstimatorChoice) -> Result<f64> {
    modularity_cached(&MiCache::new(rep), choice)
}

pub(crate) fn dcimig_cached(cache: &MiCache, choice: &EstimatorChoice) -> Result<f64> {
    let h = cache.factor_entropies(choice)?;
    check_entropies(&h, false)?;
    let mi = cache.pairwise(choice)?;
    let mut claimed = vec![0.0f64; mi.cols()];
    for i in 0..mi.rows() {
        let (j, first, second) = top_two(mi.row(i));
        claimed[j] = claimed[j].max(first - second);
    }
    let score = claimed.iter().sum::<f64>() / h.iter().sum::<f64>();
    Ok(score.clamp(0.0, 1.0))
}

/// Per-code gaps, credited to the claimed factor, over total factor entropy.
pub fn dcimig(rep: &Representation, choice: &EstimatorChoice) -> Result<f64> {
    dcimig_cached(&MiCache::new(rep), choice)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DciBackend {
    Lasso,
    Forest { n_trees: usize, max_depth: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DciConfig {
    pub l1_penalty: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub test_fraction: f64,
    pub seed: u64,
    pub backend: DciBackend,
}

impl Default for DciConfig {
    fn default() -> Self {
        DciConfig {
            l1_penalty: 0.01,
            max_iterations: 1000,
            tolerance: 1e-6,
            test_fraction: 0.3,
            seed: 0,
            backend: DciBackend::Lasso,
        }
    }
}

impl DciConfig {
    pub fn forest() -> Self {
        DciConfig {
            backend: DciBackend::Forest { n_trees: 50, max_depth: 8 },
            ..DciConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DciScores {
    pub disentanglement: f64,
    pub completeness: f64,
    pub informativeness: f64,
}

/// Entropy of a distribution in log base `base` (0 for base 1).
fn entropy_base(p: &[f64], base: usize) -> f64 {
    if base <= 1 {
        return 0.0;
    }
    let h: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    h / (base as f64).ln()
}

/// Aggregates an importance matrix (codes x factors) into (D, C).
pub fn dci_from_importance(r: &Matrix) -> Result<(f64, f64)> {
    let (d, k) = (r.rows(), r.cols());
    for j in 0..k {
        if r.column(j).iter().sum::<f64>() <= 0.0 {
            return Err(Error::AllZeroImportance(j));
        }
    }
    let total: f64 = r.as_slice().iter().sum();
    let mut dis = 0.0;
    for i in 0..d {
        let row = r.row(i);
        let s: f64 = row.iter().sum();
        if s <= 0.0 {
            continue;
        }
        let p: Vec<f64> = row.iter().map(|v| v / s).collect();
        dis += (s / total) * (1.0 - entropy_base(&p, k));
    }
    let mut comp = 0.0;
    for j in 0..k {
        let col = r.column(j);
        let s: f64 = col.iter().sum();
        let p: Vec<f64> = col.iter().map(|v| v / s).collect();
        comp += 1.0 - entropy_base(&p, d);
    }
    Ok((dis.clamp(0.0, 1.0), (comp / k as f64).clamp(0.0, 1.0)))
}

/// DCI with the LASSO importance model.
pub fn dci(rep: &Representation, cfg: &DciConfig) -> Result<(f64, f64, f64)> {
    let s = dci_with(rep, cfg)?;
    Ok((s.disentanglement, s.completeness, s.informativeness))
}

/// DCI with the backend chosen in `cfg`.
pub fn dci_with(rep: &Representation, cfg: &DciConfig) -> Result<DciScores> {
    if rep.n() < 100 {
        return Err(Error::TooFewSamples { needed: 100, got: rep.n() });
    }
    let (d, k) = (rep.d(), rep.k());
    let (train, test) = train_test_split(rep.n(), cfg.test_fraction, cfg.seed);
    let codes = rep.codes.columns();
    let mut importance = Matrix::zeros(d, k);
    let mut info = 0.0;
    for j in 0..k {
        let z = rep.factors.column(j);
        let score = match &cfg.backend {
            DciBackend::Lasso => {
                let (coef, pred) = lasso_fit(&codes, &z, &train, &test, cfg);
                for (i, c) in coef.iter().enumerate() {
                    importance.set(i, j, c.abs());
                }
                informativeness(rep, j, &z, &test, &pred)
            }
            DciBackend::Forest { n_trees, max_depth } => {
                let fseed = crate::seed::mix(cfg.seed, j as u64);
                let forest = match rep.factor_kinds[j] {
                    FactorKind::Discrete { categories } => {
                        let y: Vec<usize> = z.iter().map(|v| *v as usize).collect();
                        let target = Target::Classes { labels: &y, n_classes: categories as usize };
                        RandomForest::fit(&rep.codes, &train, target, *n_trees, *max_depth, fseed)
                    }
                    FactorKind::Continuous { .. } => {
                        RandomForest::fit(&rep.codes, &train, Target::Values(&z), *n_trees, *max_depth, fseed)
                    }
                };
                for (i, v) in forest.importances.iter().enumerate() {
                    importance.set(i, j, *v);
                }
                let pred: Vec<f64> = test.iter().map(|&r| forest.predict_row(rep.codes.row(r))).collect();
                informativeness(rep, j, &z, &test, &pred)
            }
        };
        info += score;
    }
    let (dis, comp) = dci_from_importance(&importance)?;
    Ok(DciScores {
        disentanglement: dis,
        completeness: comp,
        informativeness: (info / k as f64).clamp(0.0, 1.0),
    })
}

/// Fits a LASSO on standardised codes and target; returns |coefficients| on the
/// standardised scale and test predictions on the original scale.
fn lasso_fit(codes: &[Vec<f64>], z: &[f64], train: &[usize], test: &[usize], cfg: &DciConfig) -> (Vec<f64>, Vec<f64>) {
    let standardize = |v: &[f64], idx: &[usize]| -> (f64, f64) {
        let sub: Vec<f64> = idx.iter().map(|&r| v[r]).collect();
        let sd = std_dev(&sub);
        (mean(&sub), if sd > 0.0 { sd } else { 1.0 })
    };
    let stats: Vec<(f64, f64)> = codes.iter().map(|c| standardize(c, train)).collect();
    let x: Vec<Vec<f64>> = codes
        .iter()
        .zip(&stats)
        .map(|(c, (m, s))| train.iter().map(|&r| (c[r] - m) / s).collect())
        .collect();
    let (zm, zs) = standardize(z, train);
    let y: Vec<f64> = train.iter().map(|&r| (z[r] - zm) / zs).collect();
    let fit = Lasso::fit(&x, &y, cfg.l1_penalty, cfg.max_iterations, cfg.tolerance);
    let pred = test
        .iter()
        .map(|&r| {
            let row: Vec<f64> = codes.iter().zip(&stats).map(|(c, (m, s))| (c[r] - m) / s).collect();
            fit.predict_row(&row) * zs + zm
        })
        .collect();
    (fit.coef, pred)
}

/// Held-out R² (continuous) or accuracy of rounded predictions (discrete), clamped to [0,1].
fn informativeness(rep: &Representation, j: usize, z: &[f64], test: &[usize], pred: &[f64]) -> f64 {
    let truth: Vec<f64> = test.iter().map(|&r| z[r]).collect();
    let v = match rep.factor_kinds[j] {
        FactorKind::Continuous { .. } => r_squared(&truth, pred),
        FactorKind::Discrete { categories } => {
            let t: Vec<usize> = truth.iter().map(|v| *v as usize).collect();
            let p: Vec<usize> = pred
                .iter()
                .map(|v| v.round().clamp(0.0, categories as f64 - 1.0) as usize)
                .collect();
            accuracy(&t, &p)
        }
    };
    v.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn importance_aggregation_extremes() {
        let ident = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(dci_from_importance(&ident).unwrap(), (1.0, 1.0));
        let flat = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (d, c) = dci_from_importance(&flat).unwrap();
        assert!(d.abs() < 1e-12 && c.abs() < 1e-12);
        let dead = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(dci_from_importance(&dead), Err(Error::AllZeroImportance(1))));
    }
}
