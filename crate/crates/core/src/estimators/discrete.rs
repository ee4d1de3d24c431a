//! Plug-in (maximum-likelihood) entropy and mutual information.

use crate::error::{Error, Result};

/// Compact category labels for arbitrary real values; equal values share a label.
pub fn labels(values: &[f64]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0u32; values.len()];
    let mut next = 0u32;
    for w in 0..order.len() {
        if w > 0 && values[order[w]].to_bits() != values[order[w - 1]].to_bits() {
            next += 1;
        }
        out[order[w]] = next;
    }
    out
}

/// Labels for the tuple formed by several label columns.
pub fn joint_labels(columns: &[Vec<u32>]) -> Vec<u32> {
    match columns {
        [] => Vec::new(),
        [only] => only.clone(),
        [first, rest @ ..] => {
            let mut acc = first.clone();
            for col in rest {
                let stride = col.iter().copied().max().map_or(1, |m| m as u64 + 1);
                let pairs: Vec<f64> = acc
                    .iter()
                    .zip(col)
                    .map(|(&a, &b)| (a as u64 * stride + b as u64) as f64)
                    .collect();
                acc = labels(&pairs);
            }
            acc
        }
    }
}

/// Entropy in nats from category counts. Counts are summed in sorted order so that
/// equal count multisets give bit-identical results.
pub fn entropy_from_counts(mut counts: Vec<usize>) -> f64 {
    counts.retain(|&c| c > 0);
    counts.sort_unstable();
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

pub fn label_entropy(labels: &[u32]) -> f64 {
    let size = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut counts = vec![0usize; size];
    for &l in labels {
        counts[l as usize] += 1;
    }
    entropy_from_counts(counts)
}

/// Plug-in entropy of an integer sequence.
pub fn discrete_entropy(samples: &[i64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let as_real: Vec<f64> = samples.iter().map(|&s| s as f64).collect();
    Ok(label_entropy(&labels(&as_real)))
}

/// Plug-in MI between two labelled sequences, H(x) + H(y) - H(x,y), floored at 0.
pub fn label_mi(x: &[u32], y: &[u32]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hx = label_entropy(x);
    let hy = label_entropy(y);
    let hxy = label_entropy(&joint_labels(&[x.to_vec(), y.to_vec()]));
    Ok(((hx + hy) - hxy).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ten() {
        let s: Vec<i64> = (0..1000).map(|i| i % 10).collect();
        assert!((discrete_entropy(&s).unwrap() - 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_is_zero() {
        assert_eq!(discrete_entropy(&[4; 17]).unwrap(), 0.0);
        assert!(discrete_entropy(&[]).is_err());
    }

    #[test]
    fn coin() {
        let s = [0, 1, 0, 1];
        assert!((discrete_entropy(&s).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn self_information_is_entropy() {
        let x: Vec<u32> = (0..500u32).map(|i| (i * 7919) % 13).collect();
        assert_eq!(label_mi(&x, &x).unwrap(), label_entropy(&x));
    }

    #[test]
    fn joint_labels_distinguish_tuples() {
        let a = vec![0, 0, 1, 1];
        let b = vec![0, 1, 0, 1];
        let j = joint_labels(&[a, b]);
        assert_eq!(j, vec![0, 1, 2, 3]);
    }
}
