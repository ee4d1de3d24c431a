//! Entropy and mutual-information backends.

pub mod binned;
pub mod discrete;
pub mod dv;
pub mod kdtree;
pub mod ksg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use binned::{bin_indices, binned_mi};
pub use discrete::discrete_entropy;
pub use dv::{neural_dv_mi, DvConfig};
pub use ksg::ksg_mi;

use crate::error::{Error, Result};

/// Default histogram resolution.
pub const DEFAULT_BINS: usize = 20;
/// Default neighbour count for KSG.
pub const DEFAULT_K: usize = 3;
/// Bins used when a continuous variable needs a plug-in entropy.
pub const QUANTIZE_BINS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EstimatorChoice {
    DiscretePlugin,
    Binned { bins: usize },
    Ksg { k_neighbors: usize },
    NeuralDv(DvConfig),
}

impl EstimatorChoice {
    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorChoice::Binned { bins } if *bins < 2 => {
                Err(Error::InvalidConfig(format!("bins must be >= 2, got {bins}")))
            }
            EstimatorChoice::Ksg { k_neighbors } if *k_neighbors < 1 => {
                Err(Error::InvalidConfig("k_neighbors must be >= 1".into()))
            }
            EstimatorChoice::NeuralDv(cfg) => cfg.validate(),
            _ => Ok(()),
        }
    }

    /// Same estimator with its seed (if any) replaced.
    pub fn with_seed(&self, seed: u64) -> EstimatorChoice {
        match self {
            EstimatorChoice::NeuralDv(cfg) => EstimatorChoice::NeuralDv(DvConfig {
                seed,
                ..cfg.clone()
            }),
            other => other.clone(),
        }
    }
}

impl fmt::Display for EstimatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorChoice::DiscretePlugin => write!(f, "discrete"),
            EstimatorChoice::Binned { bins } => write!(f, "binned:{bins}"),
            EstimatorChoice::Ksg { k_neighbors } => write!(f, "ksg:{k_neighbors}"),
            EstimatorChoice::NeuralDv(_) => write!(f, "dv"),
        }
    }
}

impl FromStr for EstimatorChoice {
    type Err = Error;

    /// `discrete`, `binned[:B]`, `ksg[:K]` or `dv`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| {
                a.parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad estimator parameter in `{s}`")))
            })
        };
        let choice = match (name, arg) {
            ("discrete", None) => EstimatorChoice::DiscretePlugin,
            ("binned", _) => EstimatorChoice::Binned { bins: num(DEFAULT_BINS)? },
            ("ksg", _) => EstimatorChoice::Ksg { k_neighbors: num(DEFAULT_K)? },
            ("dv", None) => EstimatorChoice::NeuralDv(DvConfig::default()),
            _ => return Err(Error::InvalidConfig(format!("unknown estimator `{s}`"))),
        };
        choice.validate()?;
        Ok(choice)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Discrete,
    Continuous,
}

impl VarKind {
    /// Integer-valued columns are treated as discrete.
    pub fn infer(values: &[f64]) -> VarKind {
        if values.iter().all(|v| v.fract() == 0.0) {
            VarKind::Discrete
        } else {
            VarKind::Continuous
        }
    }
}

/// One or more sample columns treated as a single random variable.
#[derive(Clone, Debug)]
pub struct Variable<'a> {
    pub columns: Vec<&'a [f64]>,
    pub kind: VarKind,
}

impl<'a> Variable<'a> {
    pub fn new(columns: Vec<&'a [f64]>, kind: VarKind) -> Self {
        Variable { columns, kind }
    }

    pub fn discrete(col: &'a [f64]) -> Self {
        Variable::new(vec![col], VarKind::Discrete)
    }

    pub fn continuous(col: &'a [f64]) -> Self {
        Variable::new(vec![col], VarKind::Continuous)
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        if self.columns.is_empty() || n == 0 {
            return Err(Error::EmptyInput);
        }
        for c in &self.columns {
            if c.len() != n {
                return Err(Error::LengthMismatch(n, c.len()));
            }
        }
        Ok(())
    }

    /// Category labels under plug-in estimation; continuous columns are quantized.
    fn plugin_labels(&self, bins: usize) -> Vec<u32> {
        binned::discretize(&self.columns, self.kind == VarKind::Discrete, bins)
    }
}

/// Mutual information between `x` and `y` in nats under the chosen backend.
pub fn mutual_information(x: &Variable, y: &Variable, choice: &EstimatorChoice) -> Result<f64> {
    x.check()?;
    y.check()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    match choice {
        EstimatorChoice::DiscretePlugin => {
            if x.kind != VarKind::Discrete || y.kind != VarKind::Discrete {
                return Err(Error::IncompatibleEstimator {
                    estimator: choice.to_string(),
                    reason: "plug-in estimation needs discrete variables on both sides".into(),
                });
            }
            discrete::label_mi(&x.plugin_labels(0), &y.plugin_labels(0))
        }
        EstimatorChoice::Binned { bins } => {
            if x.len() < 2 {
                return Err(Error::EmptyInput);
            }
            discrete::label_mi(&x.plugin_labels(*bins), &y.plugin_labels(*bins))
        }
        EstimatorChoice::Ksg { k_neighbors } => ksg::ksg_mi(&x.columns, &y.columns, *k_neighbors),
        EstimatorChoice::NeuralDv(cfg) => dv::neural_dv_mi(&x.columns, &y.columns, cfg),
    }
}

/// Plug-in entropy; continuous variables are first quantized into [`QUANTIZE_BINS`] bins.
pub fn plugin_entropy(v: &Variable) -> Result<f64> {
    v.check()?;
    Ok(discrete::label_entropy(&v.plugin_labels(QUANTIZE_BINS)))
}

/// Entropy used to normalise MI gaps: the backend's own estimate of I(v; v).
/// The neural backend falls back to the plug-in entropy to avoid a training run
/// per normaliser.
pub fn self_information(v: &Variable, choice: &EstimatorChoice) -> Result<f64> {
    match choice {
        EstimatorChoice::DiscretePlugin if v.kind != VarKind::Discrete => {
            Err(Error::IncompatibleEstimator {
                estimator: choice.to_string(),
                reason: "plug-in estimation needs a discrete variable".into(),
            })
        }
        EstimatorChoice::DiscretePlugin => plugin_entropy(v),
        EstimatorChoice::Binned { bins } => {
            v.check()?;
            Ok(discrete::label_entropy(&v.plugin_labels(*bins)))
        }
        EstimatorChoice::Ksg { .. } => mutual_information(v, v, choice),
        EstimatorChoice::NeuralDv(_) => plugin_entropy(v),
    }
}
