//! Kraskov–Stögbauer–Grassberger estimator (algorithm 1, max-norm).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kdtree::KdTree;
use crate::error::{Error, Result};
use crate::seed::{hash_f64s, mix};

pub const JITTER: f64 = 1e-10;

/// Digamma for positive reals (recurrence plus asymptotic series).
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln() - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0))))
}

/// psi(0..=n) for integer arguments, with psi(0) unused.
fn digamma_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    if n >= 1 {
        t[1] = -0.577_215_664_901_532_9;
    }
    for i in 2..=n {
        t[i] = t[i - 1] + 1.0 / (i - 1) as f64;
    }
    t
}

fn hash_columns(cols: &[&[f64]]) -> u64 {
    cols.iter().fold(0x5eed, |h, c| mix(h, hash_f64s(c)))
}

/// Adds tie-breaking noise scaled by each column's range.
fn jittered(cols: &[&[f64]], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cols.iter()
        .map(|c| {
            let (lo, hi) = c
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            let range = hi - lo;
            let scale = JITTER * if range > 0.0 { range } else { lo.abs().max(1.0) };
            c.iter().map(|&v| v + scale * rng.gen_range(-1.0..1.0)).collect()
        })
        .collect()
}

/// Interleaves columns into row-major points.
fn interleave(cols: &[Vec<f64>]) -> Vec<f64> {
    let n = cols[0].len();
    let mut out = Vec::with_capacity(n * cols.len());
    for r in 0..n {
        out.extend(cols.iter().map(|c| c[r]));
    }
    out
}

/// Counts of neighbours strictly within `eps[i]` in a marginal space, self excluded.
fn marginal_counts(cols: &[Vec<f64>], eps: &[f64]) -> Vec<usize> {
    let n = eps.len();
    if cols.len() == 1 {
        let v = &cols[0];
        let mut sorted = v.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        (0..n)
            .map(|i| {
                let (q, r) = (v[i], eps[i]);
                let lo = sorted.partition_point(|&s| s <= q - r);
                let hi = sorted.partition_point(|&s| s < q + r);
                // the query itself always lies inside an open ball of positive radius
                (hi - lo).saturating_sub(1)
            })
            .collect()
    } else {
        let pts = interleave(cols);
        let dim = cols.len();
        let tree = KdTree::build(&pts, dim);
        (0..n)
            .map(|i| tree.count_within(&pts[i * dim..(i + 1) * dim], eps[i]).saturating_sub(1))
            .collect()
    }
}

/// KSG mutual information between two multi-column variables, in nats, floored at 0.
pub fn ksg_mi(x: &[&[f64]], y: &[&[f64]], k: usize) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = x[0].len();
    for c in x.iter().chain(y) {
        if c.len() != n {
            return Err(Error::LengthMismatch(n, c.len()));
        }
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k_neighbors must be >= 1".into()));
    }
    if n < k + 1 {
        return Err(Error::TooFewSamples { needed: k + 1, got: n });
    }
    // Jitter seeds depend on both variables' contents, ordered by hash, so that
    // swapping the arguments reproduces the same perturbed data.
    let (hx, hy) = (hash_columns(x), hash_columns(y));
    let (sx, sy) = if hx <= hy {
        (mix(mix(hx, hy), 1), mix(mix(hx, hy), 2))
    } else {
        (mix(mix(hy, hx), 2), mix(mix(hy, hx), 1))
    };
    let xj = jittered(x, sx);
    let yj = jittered(y, sy);
    let mut joint_cols = xj.clone();
    joint_cols.extend(yj.iter().cloned());
    let dim = joint_cols.len();
    let pts = interleave(&joint_cols);
    let tree = KdTree::build(&pts, dim);
    let eps: Vec<f64> = (0..n)
        .map(|i| tree.kth_distance(&pts[i * dim..(i + 1) * dim], k, i))
        .collect();
    let nx = marginal_counts(&xj, &eps);
    let ny = marginal_counts(&yj, &eps);
    let psi = digamma_table(n + 1);
    let mut acc = 0.0;
    for i in 0..n {
        acc += psi[nx[i] + 1] + psi[ny[i] + 1];
    }
    let est = psi[k] + psi[n] - acc / n as f64;
    Ok(est.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_known_values() {
        assert!((digamma(1.0) + 0.5772156649015329).abs() < 1e-12);
        assert!((digamma(0.5) + 1.9635100260214235).abs() < 1e-12);
        let t = digamma_table(50);
        assert!((t[50] - digamma(50.0)).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let x = [0.0, 1.0, 2.0];
        assert!(matches!(
            ksg_mi(&[&x], &[&x], 3),
            Err(Error::TooFewSamples { needed: 4, got: 3 })
        ));
    }
}
