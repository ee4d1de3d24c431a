//! Multinomial logistic regression trained by full-batch gradient descent.

#[derive(Clone, Debug)]
pub struct Logistic {
    n_features: usize,
    n_classes: usize,
    // n_features x n_classes, then biases
    w: Vec<f64>,
    b: Vec<f64>,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

pub struct LogisticParams {
    pub iterations: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            iterations: 500,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

fn softmax(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    for v in z.iter_mut() {
        *v /= s;
    }
}

impl Logistic {
    /// Features are standardised with training statistics before fitting.
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &LogisticParams) -> Logistic {
        let n = x.len();
        let p = x.first().map_or(0, Vec::len);
        let nf = n as f64;
        let mut mean = vec![0.0; p];
        let mut scale = vec![0.0; p];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / nf;
            }
        }
        for row in x {
            for j in 0..p {
                scale[j] += (row[j] - mean[j]).powi(2) / nf;
            }
        }
        for s in scale.iter_mut() {
            *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
        }
        let xs: Vec<Vec<f64>> = x
            .iter()
            .map(|r| (0..p).map(|j| (r[j] - mean[j]) / scale[j]).collect())
            .collect();
        let mut model = Logistic {
            n_features: p,
            n_classes,
            w: vec![0.0; p * n_classes],
            b: vec![0.0; n_classes],
            mean,
            scale,
        };
        let mut gw = vec![0.0; p * n_classes];
        let mut gb = vec![0.0; n_classes];
        let mut z = vec![0.0; n_classes];
        for _ in 0..params.iterations {
            gw.iter_mut().for_each(|v| *v = 0.0);
            gb.iter_mut().for_each(|v| *v = 0.0);
            for (row, &label) in xs.iter().zip(y) {
                model.scores(row, &mut z);
                softmax(&mut z);
                z[label] -= 1.0;
                for c in 0..n_classes {
                    gb[c] += z[c] / nf;
                    for j in 0..p {
                        gw[j * n_classes + c] += row[j] * z[c] / nf;
                    }
                }
            }
            for (w, g) in model.w.iter_mut().zip(&gw) {
                *w -= params.learning_rate * (g + params.l2 * *w);
            }
            for (b, g) in model.b.iter_mut().zip(&gb) {
                *b -= params.learning_rate * g;
            }
        }
        model
    }

    fn scores(&self, standardized: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.b);
        for (j, v) in standardized.iter().enumerate() {
            for c in 0..self.n_classes {
                out[c] += v * self.w[j * self.n_classes + c];
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let xs: Vec<f64> = (0..self.n_features)
            .map(|j| (row[j] - self.mean[j]) / self.scale[j])
            .collect();
        let mut z = vec![0.0; self.n_classes];
        self.scores(&xs, &mut z);
        let mut best = 0;
        for c in 1..self.n_classes {
            if z[c] > z[best] {
                best = c;
            }
        }
        best
    }
}
