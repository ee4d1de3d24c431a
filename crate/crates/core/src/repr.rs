//! Representations, metric reports and result rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Domain of a ground-truth factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorKind {
    Discrete { categories: u32 },
    Continuous { lower: f64, upper: f64 },
}

impl FactorKind {
    pub fn is_discrete(&self) -> bool {
        matches!(self, FactorKind::Discrete { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FactorKind::Discrete { categories } if categories < 2 => Err(Error::MissingKinds(
                format!("discrete factor needs at least 2 categories, got {categories}"),
            )),
            FactorKind::Continuous { lower, upper } if !(lower < upper) => Err(
                Error::MissingKinds(format!("continuous bounds {lower} >= {upper}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Ground-truth factors (N x k) paired with latent codes (N x d).
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub factors: Matrix,
    pub codes: Matrix,
    pub factor_kinds: Vec<FactorKind>,
    pub seed: u64,
    pub alpha: Option<f64>,
}

impl Representation {
    /// Builds and validates.
    pub fn new(
        factors: Matrix,
        codes: Matrix,
        factor_kinds: Vec<FactorKind>,
        seed: u64,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let rep = Representation {
            factors,
            codes,
            factor_kinds,
            seed,
            alpha,
        };
        validate_representation(&rep)?;
        Ok(rep)
    }

    pub fn n(&self) -> usize {
        self.factors.rows()
    }

    pub fn k(&self) -> usize {
        self.factors.cols()
    }

    pub fn d(&self) -> usize {
        self.codes.cols()
    }

    /// Rows `idx` of both matrices.
    pub fn select_rows(&self, idx: &[usize]) -> Representation {
        Representation {
            factors: self.factors.select_rows(idx),
            codes: self.codes.select_rows(idx),
            factor_kinds: self.factor_kinds.clone(),
            seed: self.seed,
            alpha: self.alpha,
        }
    }
}

/// Checks every structural invariant of a representation.
pub fn validate_representation(rep: &Representation) -> Result<()> {
    let n = rep.factors.rows();
    if rep.codes.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "factors have {n} rows, codes have {}",
            rep.codes.rows()
        )));
    }
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "need at least 2 rows, got {n}"
        )));
    }
    if rep.factor_kinds.len() != rep.factors.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} factor kinds for {} factor columns",
            rep.factor_kinds.len(),
            rep.factors.cols()
        )));
    }
    if let Some(a) = rep.alpha {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::DomainViolation(format!("alpha {a} outside [0,1]")));
        }
    }
    for (r, v) in rep.factors.as_slice().iter().enumerate() {
        if !v.is_finite() {
            let (row, col) = (r / rep.k(), r % rep.k());
            return Err(Error::NonFinite(format!("factor z{col}, row {row}")));
        }
    }
    for (r, v) in rep.codes.as_slice().iter().enumerate() {
        if !v.is_finite() {
            let (row, col) = (r / rep.d(), r % rep.d());
            return Err(Error::NonFinite(format!("code c{col}, row {row}")));
        }
    }
    for (j, kind) in rep.factor_kinds.iter().enumerate() {
        kind.validate()?;
        if let FactorKind::Discrete { categories } = *kind {
            for r in 0..n {
                let v = rep.factors.get(r, j);
                if v.fract() != 0.0 || v < 0.0 || v >= categories as f64 {
                    return Err(Error::DomainViolation(format!(
                        "factor z{j}, row {r}: {v} is not a category in [0,{categories})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Which aspect of disentanglement a score measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    Modularity,
    Compactness,
    Explicitness,
    Single,
}

impl Component {
    pub fn as_str(&self) -> &'static str {
        match self {
            Component::Modularity => "mod",
            Component::Compactness => "comp",
            Component::Explicitness => "expl",
            Component::Single => "score",
        }
    }

    pub fn parse(s: &str) -> Option<Component> {
        match s {
            "mod" => Some(Component::Modularity),
            "comp" => Some(Component::Compactness),
            "expl" => Some(Component::Explicitness),
            "score" => Some(Component::Single),
            _ => None,
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub metric: String,
    pub component: Component,
    pub value: f64,
}

/// Named scores of one or more metrics on a single representation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    entries: Vec<ReportEntry>,
}

impl MetricReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a score; duplicate (metric, component) pairs and non-finite values are rejected.
    pub fn insert(&mut self, metric: &str, component: Component, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("{metric}/{component}")));
        }
        if self.get(metric, component).is_some() {
            return Err(Error::InvalidConfig(format!(
                "duplicate report entry {metric}/{component}"
            )));
        }
        self.entries.push(ReportEntry {
            metric: metric.to_string(),
            component,
            value,
        });
        Ok(())
    }

    pub fn get(&self, metric: &str, component: Component) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.metric == metric && e.component == component)
            .map(|e| e.value)
    }

    pub fn entries(&self) -> &[ReportEntry] {
        &self.entries
    }

    pub fn extend(&mut self, other: MetricReport) -> Result<()> {
        for e in other.entries {
            self.insert(&e.metric, e.component, e.value)?;
        }
        Ok(())
    }
}

/// Long-format record written to results CSV files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub alpha: f64,
    pub seed: u64,
    pub rep_index: u64,
    pub metric: String,
    pub component: String,
    pub value: f64,
    pub elapsed_ms: f64,
}
