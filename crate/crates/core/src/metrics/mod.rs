//! Metric implementations and the name-based registry used by the harness.

pub mod classic;
pub mod edi;
mod registry;

use std::cell::RefCell;
use std::collections::HashMap;

pub use classic::{
    dci, dci_with, dcimig, mig, mig_gaps, mig_sup, modularity_score, sap, zdiff, zminvar, DciBackend, DciConfig,
    DciScores, InterventionConfig,
};
pub use edi::{
    edi_compactness, edi_explicitness, edi_modularity, exclusivity, impact_intensity, impact_intensity_with,
    EdiConfig, EdiDiagnostics, ImpactMatrix, JointPolicy,
};
pub use registry::{all_metric_names, reference_metric_set, parse_metric, Metric, MetricKind, MetricSpec};

use crate::error::Result;
use crate::estimators::{mutual_information, self_information, EstimatorChoice, VarKind, Variable};
use crate::matrix::Matrix;
use crate::repr::Representation;
use crate::seed::mix;

/// Column-major view of a representation plus memoised MI tables, so that several
/// metrics scored on the same data share estimator work.
pub struct MiCache<'a> {
    pub rep: &'a Representation,
    factors: Vec<Vec<f64>>,
    codes: Vec<Vec<f64>>,
    code_kinds: Vec<VarKind>,
    pairwise: RefCell<HashMap<String, Matrix>>,
    factor_info: RefCell<HashMap<String, Vec<f64>>>,
    code_info: RefCell<HashMap<String, Vec<f64>>>,
}

impl<'a> MiCache<'a> {
    pub fn new(rep: &'a Representation) -> Self {
        let codes = rep.codes.columns();
        let code_kinds = codes.iter().map(|c| VarKind::infer(c)).collect();
        MiCache {
            rep,
            factors: rep.factors.columns(),
            codes,
            code_kinds,
            pairwise: RefCell::default(),
            factor_info: RefCell::default(),
            code_info: RefCell::default(),
        }
    }

    pub fn factor(&self, j: usize) -> &[f64] {
        &self.factors[j]
    }

    pub fn code(&self, i: usize) -> &[f64] {
        &self.codes[i]
    }

    pub fn factor_var(&self, j: usize) -> Variable<'_> {
        let kind = if self.rep.factor_kinds[j].is_discrete() {
            VarKind::Discrete
        } else {
            VarKind::Continuous
        };
        Variable::new(vec![&self.factors[j]], kind)
    }

    /// Codes are categorical when integer-valued, except under histogram
    /// estimation where they are always binned.
    pub fn code_var(&self, i: usize, choice: &EstimatorChoice) -> Variable<'_> {
        let kind = match choice {
            EstimatorChoice::Binned { .. } => VarKind::Continuous,
            _ => self.code_kinds[i],
        };
        Variable::new(vec![&self.codes[i]], kind)
    }

    pub fn codes_all_discrete(&self) -> bool {
        self.code_kinds.iter().all(|k| *k == VarKind::Discrete)
    }

    /// d x k table of I(c_i; z_j).
    pub fn pairwise(&self, choice: &EstimatorChoice) -> Result<Matrix> {
        let key = choice.to_string();
        if let Some(m) = self.pairwise.borrow().get(&key) {
            return Ok(m.clone());
        }
        let (d, k) = (self.rep.d(), self.rep.k());
        let mut m = Matrix::zeros(d, k);
        for i in 0..d {
            for j in 0..k {
                let est = choice.with_seed(mix(self.rep.seed, (i * k + j) as u64));
                m.set(i, j, mutual_information(&self.code_var(i, choice), &self.factor_var(j), &est)?);
            }
        }
        self.pairwise.borrow_mut().insert(key, m.clone());
        Ok(m)
    }

    /// Normalising entropy of every factor under `choice`.
    pub fn factor_entropies(&self, choice: &EstimatorChoice) -> Result<Vec<f64>> {
        let key = choice.to_string();
        if let Some(v) = self.factor_info.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = (0..self.rep.k())
            .map(|j| self_information(&self.factor_var(j), choice))
            .collect::<Result<Vec<_>>>()?;
        self.factor_info.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// Normalising entropy of every code under `choice`.
    pub fn code_entropies(&self, choice: &EstimatorChoice) -> Result<Vec<f64>> {
        let key = choice.to_string();
        if let Some(v) = self.code_info.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = (0..self.rep.d())
            .map(|i| self_information(&self.code_var(i, choice), choice))
            .collect::<Result<Vec<_>>>()?;
        self.code_info.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

/// Index of the largest value; the first one wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Largest value and the largest among the rest (0 when there is no other).
pub(crate) fn top_two(values: &[f64]) -> (usize, f64, f64) {
    let best = argmax(values);
    let second = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let second = if second.is_finite() { second } else { 0.0 };
    (best, values[best], second)
}
