//! Synthetic representation generators: boundary cases and the
//! non-linearity, rotation and noise sweeps.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::repr::{FactorKind, Representation};

/// Fraction of categories collapsed in reduced-information cases.
pub const DEFAULT_DROP_FRACTION: f64 = 0.6;

/// One of the eight calibration layouts, keyed by modularity/compactness/explicitness flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCase {
    pub code3: String,
    pub categories: u32,
    pub drop_fraction: f64,
}

impl BoundaryCase {
    pub fn new(code3: &str) -> Self {
        BoundaryCase {
            code3: code3.to_string(),
            categories: 10,
            drop_fraction: DEFAULT_DROP_FRACTION,
        }
    }

    /// All eight cases in order 000..111.
    pub fn all() -> Vec<BoundaryCase> {
        (0..8).map(|b| BoundaryCase::new(&format!("{:03b}", b))).collect()
    }

    fn flags(&self) -> Result<(bool, bool, bool)> {
        let b = self.code3.as_bytes();
        if b.len() != 3 || b.iter().any(|c| *c != b'0' && *c != b'1') {
            return Err(Error::InvalidCase(format!("`{}` is not a 3-digit binary code", self.code3)));
        }
        if self.categories < 2 {
            return Err(Error::InvalidCase(format!("{} categories", self.categories)));
        }
        if !(self.drop_fraction > 0.0 && self.drop_fraction < 1.0) {
            return Err(Error::InvalidCase(format!("drop fraction {}", self.drop_fraction)));
        }
        Ok((b[0] == b'1', b[1] == b'1', b[2] == b'1'))
    }
}

/// Per-factor map applied before encoding: identity, or a collapse of
/// ⌈fraction·K⌉ random categories onto one surviving category.
fn category_map(alphabet: u32, explicit: bool, fraction: f64, rng: &mut ChaCha8Rng) -> Result<Vec<u32>> {
    let mut map: Vec<u32> = (0..alphabet).collect();
    if explicit {
        return Ok(map);
    }
    let drop = (fraction * alphabet as f64).ceil() as usize;
    if drop >= alphabet as usize {
        return Err(Error::InvalidCase(format!(
            "dropping {drop} of {alphabet} categories leaves none"
        )));
    }
    let mut order: Vec<u32> = (0..alphabet).collect();
    order.shuffle(rng);
    let (dropped, kept) = order.split_at(drop);
    let target = kept[rng.gen_range(0..kept.len())];
    for &c in dropped {
        map[c as usize] = target;
    }
    Ok(map)
}

/// Factors are i.i.d. discrete uniform; codes follow the case layout:
/// * `11x`: c_i encodes z_i (k = d = 2)
/// * `01x`: c_1 = z_1·K + z_2, c_2 = z_3 (k = 3, d = 2)
/// * `10x`: factors over a K² alphabet, c_1, c_2 = high and low digit of z_1, c_3 = z_2 (k = 2, d = 3)
/// * `00x`: c_1 = z_1 + z_2, c_2 = z_1 − z_2 (k = d = 2)
///
/// With the explicitness flag off, each factor passes through a collapsing category map first.
pub fn gen_boundary(case: &BoundaryCase, n: usize, seed: u64) -> Result<Representation> {
    let (m, c, e) = case.flags()?;
    if n < 100 {
        return Err(Error::InvalidCase(format!("n = {n} is below 100")));
    }
    let kc = case.categories;
    let (k, alphabet) = match (m, c) {
        (true, true) | (false, false) => (2, kc),
        (false, true) => (3, kc),
        (true, false) => (2, kc * kc),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps: Vec<Vec<u32>> = (0..k)
        .map(|_| category_map(alphabet, e, case.drop_fraction, &mut rng))
        .collect::<Result<_>>()?;
    let mut factors = Vec::with_capacity(n * k);
    let mut codes = Vec::new();
    for _ in 0..n {
        let z: Vec<u32> = (0..k).map(|_| rng.gen_range(0..alphabet)).collect();
        let r: Vec<f64> = z.iter().zip(&maps).map(|(&v, mp)| mp[v as usize] as f64).collect();
        factors.extend(z.iter().map(|&v| v as f64));
        let kf = kc as f64;
        match (m, c) {
            (true, true) => codes.extend_from_slice(&[r[0], r[1]]),
            (false, true) => codes.extend_from_slice(&[r[0] * kf + r[1], r[2]]),
            (true, false) => codes.extend_from_slice(&[(r[0] / kf).floor(), r[0] % kf, r[1]]),
            (false, false) => codes.extend_from_slice(&[r[0] + r[1], r[0] - r[1]]),
        }
    }
    let d = codes.len() / n;
    Representation::new(
        Matrix::new(n, k, factors)?,
        Matrix::new(n, d, codes)?,
        vec![FactorKind::Discrete { categories: alphabet }; k],
        seed,
        None,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Nonlinear,
    Rotation,
    Noise,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Nonlinear => "nonlinear",
            Family::Rotation => "rotation",
            Family::Noise => "noise",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonlinear" => Ok(Family::Nonlinear),
            "rotation" => Ok(Family::Rotation),
            "noise" => Ok(Family::Noise),
            _ => Err(Error::InvalidConfig(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub alpha: f64,
    pub k: usize,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(family: Family, alpha: f64, seed: u64) -> Self {
        SweepSpec {
            family,
            alpha,
            k: 6,
            d: 6,
            n: 20_000,
            seed,
        }
    }

    fn check(&self, family: Family) -> Result<()> {
        if self.family != family {
            return Err(Error::InvalidConfig(format!(
                "{} generator called with a {} spec",
                family.as_str(),
                self.family.as_str()
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!("alpha {} outside [0,1]", self.alpha)));
        }
        // every family maps code i from factor i
        if self.k != self.d || self.k == 0 {
            return Err(Error::InvalidConfig(format!("k = {} and d = {} must match", self.k, self.d)));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n = {} is below 2", self.n)));
        }
        Ok(())
    }

    fn uniform_factors(&self, rng: &mut ChaCha8Rng) -> Matrix {
        let data = (0..self.n * self.k).map(|_| rng.gen::<f64>()).collect();
        Matrix::new(self.n, self.k, data).expect("shape by construction")
    }

    fn finish(&self, factors: Matrix, codes: Matrix) -> Result<Representation> {
        Representation::new(
            factors,
            codes,
            vec![FactorKind::Continuous { lower: 0.0, upper: 1.0 }; self.k],
            self.seed,
            Some(self.alpha),
        )
    }
}

const WARP_EPS: f64 = 1e-3;

/// Monotone tangent warp of [0,1] onto itself; near identity at α = 0, steepest at α = 1.
pub fn tangent_warp(alpha: f64, z: f64) -> f64 {
    let omega = alpha * (std::f64::consts::PI - WARP_EPS) + WARP_EPS * (1.0 - alpha);
    0.5 + (omega * (z - 0.5)).tan() / (2.0 * (omega / 2.0).tan())
}

pub fn gen_nonlinear(spec: &SweepSpec) -> Result<Representation> {
    spec.check(Family::Nonlinear)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let factors = spec.uniform_factors(&mut rng);
    let codes = factors.as_slice().iter().map(|&z| tangent_warp(spec.alpha, z)).collect();
    let codes = Matrix::new(spec.n, spec.d, codes)?;
    spec.finish(factors, codes)
}

/// C = Z·R with R = (1−α)·I + α·(shift onto the next column), so that
/// c_i = (1−α)·z_i + α·z_{i−1}.
pub fn gen_rotation(spec: &SweepSpec) -> Result<Representation> {
    spec.check(Family::Rotation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let factors = spec.uniform_factors(&mut rng);
    let k = spec.k;
    let a = spec.alpha;
    let mut codes = Matrix::zeros(spec.n, k);
    for r in 0..spec.n {
        let z = factors.row(r);
        for i in 0..k {
            let prev = z[(i + k - 1) % k];
            let v = if a == 0.0 { z[i] } else { (1.0 - a) * z[i] + a * prev };
            codes.set(r, i, v);
        }
    }
    spec.finish(factors, codes)
}

/// C = (1−α)·Z + α·U with U i.i.d. uniform and independent of Z.
pub fn gen_noise(spec: &SweepSpec) -> Result<Representation> {
    spec.check(Family::Noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let factors = spec.uniform_factors(&mut rng);
    let a = spec.alpha;
    let codes = factors
        .as_slice()
        .iter()
        .map(|&z| {
            let u: f64 = rng.gen();
            if a == 0.0 {
                z
            } else {
                (1.0 - a) * z + a * u
            }
        })
        .collect();
    let codes = Matrix::new(spec.n, spec.d, codes)?;
    spec.finish(factors, codes)
}

pub fn gen_sweep(spec: &SweepSpec) -> Result<Representation> {
    match spec.family {
        Family::Nonlinear => gen_nonlinear(spec),
        Family::Rotation => gen_rotation(spec),
        Family::Noise => gen_noise(spec),
    }
}

/// `m` distinct rows drawn uniformly, in random order.
pub fn subsample(rep: &Representation, m: usize, seed: u64) -> Result<Representation> {
    if m < 2 || m > rep.n() {
        return Err(Error::TooFewRequested {
            requested: m,
            available: rep.n(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = sample(&mut rng, rep.n(), m).into_vec();
    Ok(rep.select_rows(&idx))
}
