//! L1-penalised least squares by cyclic coordinate descent.
//!
//! Minimises (1/2n)·||y − Xβ − b||² + λ·||β||₁ on centred data.

/// Fitted coefficients and intercept.
#[derive(Clone, Debug)]
pub struct Lasso {
    pub coef: Vec<f64>,
    pub intercept: f64,
}

fn soft_threshold(z: f64, g: f64) -> f64 {
    if z > g {
        z - g
    } else if z < -g {
        z + g
    } else {
        0.0
    }
}

impl Lasso {
    /// `x` is column-major: `x[j]` holds feature j for every row.
    pub fn fit(x: &[Vec<f64>], y: &[f64], lambda: f64, max_iter: usize, tol: f64) -> Lasso {
        let n = y.len();
        let p = x.len();
        let nf = n as f64;
        let x_mean: Vec<f64> = x.iter().map(|c| c.iter().sum::<f64>() / nf).collect();
        let y_mean = y.iter().sum::<f64>() / nf;
        let xc: Vec<Vec<f64>> = x
            .iter()
            .zip(&x_mean)
            .map(|(c, m)| c.iter().map(|v| v - m).collect())
            .collect();
        let norms: Vec<f64> = xc.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf).collect();
        let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
        let mut beta = vec![0.0; p];
        for _ in 0..max_iter {
            let mut max_step = 0.0f64;
            for j in 0..p {
                if norms[j] == 0.0 {
                    continue;
                }
                let col = &xc[j];
                let rho: f64 = col.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf
                    + norms[j] * beta[j];
                let new = soft_threshold(rho, lambda) / norms[j];
                let delta = new - beta[j];
                if delta != 0.0 {
                    for (r, a) in resid.iter_mut().zip(col) {
                        *r -= delta * a;
                    }
                    beta[j] = new;
                    max_step = max_step.max(delta.abs());
                }
            }
            if max_step < tol {
                break;
            }
        }
        let intercept = y_mean - beta.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();
        Lasso {
            coef: beta,
            intercept,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(row).map(|(b, v)| b * v).sum::<f64>()
    }
}
