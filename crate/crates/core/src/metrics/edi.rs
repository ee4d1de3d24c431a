//! EDI: impact intensity, exclusivity, and the modularity, compactness and
//! explicitness scores built from them.

use serde::{Deserialize, Serialize};

use super::{argmax, MiCache};
use crate::error::{Error, Result};
use crate::estimators::{
    bin_indices, mutual_information, plugin_entropy, DvConfig, EstimatorChoice, VarKind, Variable, DEFAULT_K,
    QUANTIZE_BINS,
};
use crate::matrix::Matrix;
use crate::repr::Representation;
use crate::seed::mix;

/// Joint MI below this many nats marks a factor as not captured by the codes.
pub const UNCAPTURED_NATS: f64 = 1e-6;

/// Estimator for the joint term I(c_1..c_d; z_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum JointPolicy {
    /// Plug-in on tuples when everything is discrete, otherwise the neural
    /// bound above three codes and KSG up to three.
    Auto,
    Fixed(EstimatorChoice),
}

impl std::str::FromStr for JointPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(JointPolicy::Auto)
        } else {
            Ok(JointPolicy::Fixed(s.parse()?))
        }
    }
}

impl std::fmt::Display for JointPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JointPolicy::Auto => f.write_str("auto"),
            JointPolicy::Fixed(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdiConfig {
    pub pairwise: EstimatorChoice,
    pub joint: JointPolicy,
}

impl Default for EdiConfig {
    fn default() -> Self {
        EdiConfig {
            pairwise: EstimatorChoice::Ksg { k_neighbors: DEFAULT_K },
            joint: JointPolicy::Auto,
        }
    }
}

/// Impact intensities R(c_i; z_j) and the quantities they are built from.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpactMatrix {
    /// d x k
    pub intensities: Matrix,
    /// d x k pairwise I(c_i; z_j)
    pub pairwise_mi: Matrix,
    pub joint_mi: Vec<f64>,
    pub factor_entropy: Vec<f64>,
    pub uncaptured: Vec<bool>,
}

/// `a_max - sqrt(sum of the other squares / (n-1))`; a single value is returned as is.
pub fn exclusivity(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len();
    let best = argmax(values);
    if n == 1 {
        return Ok(values[0]);
    }
    let rest: f64 = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, v)| v * v)
        .sum();
    Ok(values[best] - (rest / (n - 1) as f64).sqrt())
}

/// Impact intensities with the given pairwise estimator and automatic joint estimator.
pub fn impact_intensity(rep: &Representation, choice: &EstimatorChoice) -> Result<ImpactMatrix> {
    impact_intensity_with(
        rep,
        &EdiConfig {
            pairwise: choice.clone(),
            joint: JointPolicy::Auto,
        },
    )
}

pub fn impact_intensity_with(rep: &Representation, cfg: &EdiConfig) -> Result<ImpactMatrix> {
    impact_cached(&MiCache::new(rep), cfg)
}

fn joint_estimator(cache: &MiCache, j: usize, cfg: &EdiConfig) -> EstimatorChoice {
    match &cfg.joint {
        JointPolicy::Fixed(c) => c.clone(),
        JointPolicy::Auto => {
            if cache.codes_all_discrete() && cache.rep.factor_kinds[j].is_discrete() {
                EstimatorChoice::DiscretePlugin
            } else if cache.rep.d() > 3 {
                EstimatorChoice::NeuralDv(DvConfig::default())
            } else {
                let k = match cfg.pairwise {
                    EstimatorChoice::Ksg { k_neighbors } => k_neighbors,
                    _ => DEFAULT_K,
                };
                EstimatorChoice::Ksg { k_neighbors: k }
            }
        }
    }
}

pub(crate) fn impact_cached(cache: &MiCache, cfg: &EdiConfig) -> Result<ImpactMatrix> {
    let rep = cache.rep;
    let (d, k) = (rep.d(), rep.k());
    let pairwise = cache.pairwise(&cfg.pairwise)?;
    let mut joint_mi = Vec::with_capacity(k);
    let mut factor_entropy = Vec::with_capacity(k);
    for j in 0..k {
        let z = cache.factor_var(j);
        factor_entropy.push(plugin_entropy(&z)?);
        let est = joint_estimator(cache, j, cfg).with_seed(mix(rep.seed, 0xed1 + j as u64));
        let code_cols: Vec<&[f64]> = (0..d).map(|i| cache.code(i)).collect();
        let codes_kind = if cache.codes_all_discrete() && !matches!(est, EstimatorChoice::Binned { .. }) {
            VarKind::Discrete
        } else {
            VarKind::Continuous
        };
        let codes = Variable::new(code_cols, codes_kind);
        // the neural bound gets the quantised factor as its target
        let quantized: Vec<f64>;
        let target = if matches!(est, EstimatorChoice::NeuralDv(_)) && z.kind == VarKind::Continuous {
            quantized = bin_indices(cache.factor(j), QUANTIZE_BINS).iter().map(|&b| b as f64).collect();
            Variable::new(vec![&quantized], VarKind::Discrete)
        } else {
            z
        };
        joint_mi.push(mutual_information(&codes, &target, &est)?);
    }
    let mut intensities = Matrix::zeros(d, k);
    let mut uncaptured = vec![false; k];
    for j in 0..k {
        if joint_mi[j] < UNCAPTURED_NATS {
            uncaptured[j] = true;
            continue;
        }
        for i in 0..d {
            // pairwise information cannot exceed the joint; estimator noise can
            intensities.set(i, j, (pairwise.get(i, j) / joint_mi[j]).clamp(0.0, 1.0));
        }
    }
    Ok(ImpactMatrix {
        intensities,
        pairwise_mi: pairwise,
        joint_mi,
        factor_entropy,
        uncaptured,
    })
}

/// Per-code disentanglement D(c_i) and the factor each code is assigned to.
pub fn code_disentanglement(im: &ImpactMatrix) -> Result<Vec<(f64, usize)>> {
    (0..im.intensities.rows())
        .map(|i| {
            let row = im.intensities.row(i);
            Ok((exclusivity(row)?, argmax(row)))
        })
        .collect()
}

/// Sum of capped per-factor credit over k.
pub fn edi_modularity(im: &ImpactMatrix) -> Result<f64> {
    let k = im.intensities.cols();
    if k == 0 || im.intensities.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut s = vec![0.0; k];
    for (dc, j) in code_disentanglement(im)? {
        s[j] += dc;
    }
    Ok(s.iter().map(|v| v.min(1.0)).sum::<f64>() / k as f64)
}

/// Mean exclusivity of each factor's column.
pub fn edi_compactness(im: &ImpactMatrix) -> Result<f64> {
    let k = im.intensities.cols();
    if k == 0 || im.intensities.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for j in 0..k {
        total += exclusivity(&im.intensities.column(j))?;
    }
    Ok(total / k as f64)
}

/// Mean share of each factor's entropy held jointly by the codes.
pub fn edi_explicitness(im: &ImpactMatrix) -> Result<f64> {
    let k = im.joint_mi.len();
    if k == 0 {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for j in 0..k {
        let h = im.factor_entropy[j];
        if !(h > 1e-12) {
            return Err(Error::ZeroEntropyFactor(j));
        }
        total += (im.joint_mi[j] / h).clamp(0.0, 1.0);
    }
    Ok(total / k as f64)
}

/// Everything computed on the way to the three scores, for JSON dumps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdiDiagnostics {
    pub pairwise_estimator: String,
    pub joint_estimator: String,
    pub intensities: Vec<Vec<f64>>,
    pub pairwise_mi: Vec<Vec<f64>>,
    pub joint_mi: Vec<f64>,
    pub factor_entropy: Vec<f64>,
    pub uncaptured: Vec<bool>,
    pub code_disentanglement: Vec<f64>,
    pub code_assignment: Vec<usize>,
    /// Unnormalised average (1/k)·Σ_i D(c_i), kept for reference only.
    pub raw_modularity: f64,
    pub modularity: f64,
    pub compactness: f64,
    pub explicitness: f64,
}

impl EdiDiagnostics {
    pub fn from_matrix(im: &ImpactMatrix, cfg: &EdiConfig) -> Result<Self> {
        let rows = |m: &Matrix| (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let per_code = code_disentanglement(im)?;
        let k = im.intensities.cols() as f64;
        Ok(EdiDiagnostics {
            pairwise_estimator: cfg.pairwise.to_string(),
            joint_estimator: cfg.joint.to_string(),
            intensities: rows(&im.intensities),
            pairwise_mi: rows(&im.pairwise_mi),
            joint_mi: im.joint_mi.clone(),
            factor_entropy: im.factor_entropy.clone(),
            uncaptured: im.uncaptured.clone(),
            code_disentanglement: per_code.iter().map(|p| p.0).collect(),
            code_assignment: per_code.iter().map(|p| p.1).collect(),
            raw_modularity: per_code.iter().map(|p| p.0).sum::<f64>() / k,
            modularity: edi_modularity(im)?,
            compactness: edi_compactness(im)?,
            explicitness: edi_explicitness(im)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
