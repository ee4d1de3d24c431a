//! Neural Donsker–Varadhan lower bound on mutual information.
//!
//! A small ReLU network T(x, y) is trained to maximise
//! E_joint[T] - ln E_marginal[e^T], with the marginal formed by permuting y
//! inside each batch. The gradient of the log term uses an exponential moving
//! average of the denominator to reduce its bias.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DvConfig {
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub ema_rate: f64,
    pub seed: u64,
}

impl Default for DvConfig {
    fn default() -> Self {
        DvConfig {
            hidden_layers: vec![100, 100],
            learning_rate: 1e-3,
            batch_size: 512,
            max_epochs: 150,
            ema_rate: 0.01,
            seed: 0,
        }
    }
}

impl DvConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.hidden_layers.iter().all(|&h| h > 0)
            && self.learning_rate > 0.0
            && self.batch_size > 0
            && self.max_epochs > 0
            && self.ema_rate > 0.0
            && self.ema_rate < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid DV configuration {self:?}")))
        }
    }
}

/// Epochs whose held-out bound is averaged into the estimate.
const AVERAGED_EPOCHS: usize = 10;
const EVAL_CHUNK: usize = 4096;

struct Layer {
    n_in: usize,
    n_out: usize,
    w: Vec<f32>,
    b: Vec<f32>,
    // Adam moments for w then b
    m: Vec<f32>,
    v: Vec<f32>,
    gw: Vec<f32>,
    gb: Vec<f32>,
}

struct Mlp {
    layers: Vec<Layer>,
    step: i32,
}

impl Mlp {
    fn new(sizes: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (n_in, n_out) = (w[0], w[1]);
                let bound = 1.0 / (n_in as f32).sqrt();
                let weights = (0..n_in * n_out).map(|_| rng.gen_range(-bound..bound)).collect();
                let bias = (0..n_out).map(|_| rng.gen_range(-bound..bound)).collect();
                Layer {
                    n_in,
                    n_out,
                    w: weights,
                    b: bias,
                    m: vec![0.0; n_in * n_out + n_out],
                    v: vec![0.0; n_in * n_out + n_out],
                    gw: vec![0.0; n_in * n_out],
                    gb: vec![0.0; n_out],
                }
            })
            .collect();
        Mlp { layers, step: 0 }
    }

    /// Forward pass on `rows` inputs; returns the activations of every layer
    /// (input first, scalar output last).
    fn forward(&self, input: Vec<f32>, rows: usize) -> Vec<Vec<f32>> {
        let mut acts = vec![input];
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut out = vec![0.0f32; rows * layer.n_out];
            for r in 0..rows {
                out[r * layer.n_out..(r + 1) * layer.n_out].copy_from_slice(&layer.b);
            }
            let a = &acts[l];
            unsafe {
                matrixmultiply::sgemm(
                    rows,
                    layer.n_in,
                    layer.n_out,
                    1.0,
                    a.as_ptr(),
                    layer.n_in as isize,
                    1,
                    layer.w.as_ptr(),
                    layer.n_out as isize,
                    1,
                    1.0,
                    out.as_mut_ptr(),
                    layer.n_out as isize,
                    1,
                );
            }
            if l < last {
                for v in out.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            acts.push(out);
        }
        acts
    }

    /// Accumulates parameter gradients given dLoss/dOutput.
    fn backward(&mut self, acts: &[Vec<f32>], grad_out: Vec<f32>, rows: usize) {
        let mut g = grad_out;
        for l in (0..self.layers.len()).rev() {
            let layer = &mut self.layers[l];
            let a = &acts[l];
            unsafe {
                // gw = a^T g
                matrixmultiply::sgemm(
                    layer.n_in,
                    rows,
                    layer.n_out,
                    1.0,
                    a.as_ptr(),
                    1,
                    layer.n_in as isize,
                    g.as_ptr(),
                    layer.n_out as isize,
                    1,
                    0.0,
                    layer.gw.as_mut_ptr(),
                    layer.n_out as isize,
                    1,
                );
            }
            layer.gb.iter_mut().for_each(|v| *v = 0.0);
            for r in 0..rows {
                for (o, gb) in layer.gb.iter_mut().enumerate() {
                    *gb += g[r * layer.n_out + o];
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0f32; rows * layer.n_in];
            unsafe {
                // prev = g w^T
                matrixmultiply::sgemm(
                    rows,
                    layer.n_out,
                    layer.n_in,
                    1.0,
                    g.as_ptr(),
                    layer.n_out as isize,
                    1,
                    layer.w.as_ptr(),
                    1,
                    layer.n_out as isize,
                    0.0,
                    prev.as_mut_ptr(),
                    layer.n_in as isize,
                    1,
                );
            }
            for (p, &av) in prev.iter_mut().zip(a.iter()) {
                if av <= 0.0 {
                    *p = 0.0;
                }
            }
            g = prev;
        }
    }

    fn adam(&mut self, lr: f32) {
        const B1: f32 = 0.9;
        const B2: f32 = 0.999;
        const EPS: f32 = 1e-8;
        self.step += 1;
        let c1 = 1.0 - B1.powi(self.step);
        let c2 = 1.0 - B2.powi(self.step);
        for layer in &mut self.layers {
            let nw = layer.w.len();
            let params = layer.w.iter_mut().chain(layer.b.iter_mut());
            let grads = layer.gw.iter().chain(layer.gb.iter());
            for (((p, &g), m), v) in params.zip(grads).zip(layer.m.iter_mut()).zip(layer.v.iter_mut()) {
                *m = B1 * *m + (1.0 - B1) * g;
                *v = B2 * *v + (1.0 - B2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + EPS);
            }
            debug_assert_eq!(nw + layer.b.len(), layer.m.len());
        }
    }
}

fn standardize(cols: &[&[f64]]) -> Vec<Vec<f32>> {
    cols.iter()
        .map(|c| {
            let n = c.len() as f64;
            let mean = c.iter().sum::<f64>() / n;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            c.iter().map(|v| ((v - mean) / sd) as f32).collect()
        })
        .collect()
}

fn fill_rows(out: &mut Vec<f32>, xs: &[Vec<f32>], ys: &[Vec<f32>], pairs: impl Iterator<Item = (usize, usize)>) {
    out.clear();
    for (i, j) in pairs {
        out.extend(xs.iter().map(|c| c[i]));
        out.extend(ys.iter().map(|c| c[j]));
    }
}

fn log_mean_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + (s / values.len() as f64).ln()
}

/// DV estimate of I(x; y), averaged over the final epochs on a held-out half.
pub fn neural_dv_mi(x: &[&[f64]], y: &[&[f64]], cfg: &DvConfig) -> Result<f64> {
    cfg.validate()?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = x[0].len();
    for c in x.iter().chain(y) {
        if c.len() != n {
            return Err(Error::LengthMismatch(n, c.len()));
        }
    }
    let bsz = cfg.batch_size;
    if n < 2 * bsz {
        return Err(Error::TooFewSamples { needed: 2 * bsz, got: n });
    }
    let xs = standardize(x);
    let ys = standardize(y);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (train, eval) = order.split_at(n / 2);
    let mut train = train.to_vec();
    let eval = eval.to_vec();
    let mut eval_perm = eval.clone();
    eval_perm.shuffle(&mut rng);

    let mut sizes = vec![x.len() + y.len()];
    sizes.extend(&cfg.hidden_layers);
    sizes.push(1);
    let mut net = Mlp::new(&sizes, &mut rng);
    let lr = cfg.learning_rate as f32;
    let rate = cfg.ema_rate;
    let mut ema: Option<f64> = None;
    let mut input = Vec::new();
    let mut perm: Vec<usize> = (0..bsz).collect();
    let mut bounds = Vec::new();
    let ln_n = (n as f64).ln();

    for epoch in 0..cfg.max_epochs {
        train.shuffle(&mut rng);
        for batch in train.chunks_exact(bsz) {
            perm.shuffle(&mut rng);
            let joint = batch.iter().map(|&i| (i, i));
            let marg = batch.iter().zip(&perm).map(|(&i, &p)| (i, batch[p]));
            fill_rows(&mut input, &xs, &ys, joint.chain(marg));
            let acts = net.forward(std::mem::take(&mut input), 2 * bsz);
            let t = acts.last().expect("network has an output layer");
            let exps: Vec<f64> = t[bsz..].iter().map(|&v| (v as f64).exp()).collect();
            let mean_exp = exps.iter().sum::<f64>() / bsz as f64;
            if !mean_exp.is_finite() {
                return Err(Error::TrainingDiverged(format!("overflow in epoch {epoch}")));
            }
            let avg = match ema {
                None => mean_exp,
                Some(e) => (1.0 - rate) * e + rate * mean_exp,
            };
            ema = Some(avg);
            let mut grad = vec![-1.0 / bsz as f32; 2 * bsz];
            for (g, e) in grad[bsz..].iter_mut().zip(&exps) {
                *g = (e / (bsz as f64 * avg)) as f32;
            }
            net.backward(&acts, grad, 2 * bsz);
            net.adam(lr);
            input = acts.into_iter().next().expect("input activations");
        }
        if epoch + AVERAGED_EPOCHS >= cfg.max_epochs {
            let tj = evaluate(&net, &xs, &ys, eval.iter().map(|&i| (i, i)), &mut input);
            let tm = evaluate(&net, &xs, &ys, eval.iter().zip(&eval_perm).map(|(&i, &j)| (i, j)), &mut input);
            let bound = tj.iter().sum::<f64>() / tj.len() as f64 - log_mean_exp(&tm);
            if !bound.is_finite() || bound > ln_n {
                return Err(Error::TrainingDiverged(format!(
                    "held-out bound {bound} in epoch {epoch} (limit ln N = {ln_n:.3})"
                )));
            }
            bounds.push(bound);
        }
    }
    let est = bounds.iter().sum::<f64>() / bounds.len() as f64;
    Ok(est.max(0.0))
}

fn evaluate(
    net: &Mlp,
    xs: &[Vec<f32>],
    ys: &[Vec<f32>],
    pairs: impl Iterator<Item = (usize, usize)>,
    buf: &mut Vec<f32>,
) -> Vec<f64> {
    let pairs: Vec<(usize, usize)> = pairs.collect();
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(EVAL_CHUNK) {
        fill_rows(buf, xs, ys, chunk.iter().copied());
        let acts = net.forward(std::mem::take(buf), chunk.len());
        out.extend(acts.last().expect("output layer").iter().map(|&v| v as f64));
        *buf = acts.into_iter().next().expect("input activations");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Mlp::new(&[3, 5, 4, 1], &mut rng);
        let rows = 6;
        let input: Vec<f32> = (0..rows * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // loss = sum of outputs
        let acts = net.forward(input.clone(), rows);
        net.backward(&acts, vec![1.0; rows], rows);
        let analytic = net.layers[0].gw[2];
        let h = 1e-2f32;
        let loss = |net: &Mlp| -> f64 {
            net.forward(input.clone(), rows).last().unwrap().iter().map(|&v| v as f64).sum()
        };
        net.layers[0].w[2] += h;
        let up = loss(&net);
        net.layers[0].w[2] -= 2.0 * h;
        let down = loss(&net);
        let numeric = (up - down) / (2.0 * h as f64);
        assert!((numeric - analytic as f64).abs() < 1e-2, "{numeric} vs {analytic}");
    }

    #[test]
    fn too_few_rows() {
        let x = vec![0.0; 100];
        let cfg = DvConfig::default();
        assert!(matches!(
            neural_dv_mi(&[&x], &[&x], &cfg),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
