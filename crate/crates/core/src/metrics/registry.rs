//! Metric names, declared aspects, and evaluation through a shared [`MiCache`].

use super::classic::{
    dci_with, dcimig_cached, mig_cached, mig_sup_cached, modularity_cached, sap_seeded, zdiff, zminvar,
    DciConfig, InterventionConfig,
};
use super::edi::{edi_compactness, edi_explicitness, edi_modularity, impact_cached, EdiConfig, JointPolicy};
use super::MiCache;
use crate::error::{Error, Result};
use crate::estimators::EstimatorChoice;
use crate::repr::{Component, MetricReport};
use crate::seed::{hash_str, mix};

/// Anything the harness can score a representation with.
pub trait Metric: Send + Sync {
    /// Name written to result rows.
    fn name(&self) -> &str;
    /// Aspects of disentanglement the metric claims to measure.
    fn aspects(&self) -> &'static [Component];
    /// Components present in the report.
    fn components(&self) -> &'static [Component];
    fn evaluate(&self, cache: &MiCache, seed: u64) -> Result<MetricReport>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    Edi,
    Zdiff,
    Zmin,
    Sap,
    Mig,
    MigSup,
    Modularity,
    Dci,
    DciForest,
    Dcimig,
}

const MCE: &[Component] = &[Component::Modularity, Component::Compactness, Component::Explicitness];
const SINGLE: &[Component] = &[Component::Single];

impl MetricKind {
    fn parse(s: &str) -> Option<MetricKind> {
        Some(match s {
            "edi" => MetricKind::Edi,
            "zdiff" => MetricKind::Zdiff,
            "zmin" => MetricKind::Zmin,
            "sap" => MetricKind::Sap,
            "mig" => MetricKind::Mig,
            "mig_sup" => MetricKind::MigSup,
            "modularity" => MetricKind::Modularity,
            "dci" => MetricKind::Dci,
            "dci_rf" => MetricKind::DciForest,
            "dcimig" => MetricKind::Dcimig,
            _ => return None,
        })
    }

    fn uses_estimator(self) -> bool {
        matches!(
            self,
            MetricKind::Edi | MetricKind::Mig | MetricKind::MigSup | MetricKind::Modularity | MetricKind::Dcimig
        )
    }

    pub fn aspects(self) -> &'static [Component] {
        use Component::*;
        match self {
            MetricKind::Edi | MetricKind::Dci | MetricKind::DciForest => MCE,
            MetricKind::Zdiff | MetricKind::Zmin | MetricKind::MigSup => &[Modularity],
            MetricKind::Sap | MetricKind::Mig => &[Compactness, Explicitness],
            MetricKind::Modularity | MetricKind::Dcimig => &[Modularity, Explicitness],
        }
    }

    fn components(self) -> &'static [Component] {
        match self {
            MetricKind::Edi | MetricKind::Dci | MetricKind::DciForest => MCE,
            _ => SINGLE,
        }
    }
}

/// A metric name, optionally with an estimator override: `mig@binned:20`, `edi@ksg:3`.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub kind: MetricKind,
    pub estimator: EstimatorChoice,
    pub joint: JointPolicy,
}

/// Every metric name understood by [`parse_metric`], in canonical order.
pub fn all_metric_names() -> Vec<&'static str> {
    vec!["edi", "zdiff", "zmin", "sap", "mig", "mig_sup", "modularity", "dci", "dcimig"]
}

/// The (metric, component) pairs used for agreement analysis.
pub fn reference_metric_set() -> Vec<(String, Component)> {
    let mut out = Vec::new();
    for m in ["zmin", "sap", "mig", "mig_sup", "dcimig", "modularity"] {
        out.push((m.to_string(), Component::Single));
    }
    for m in ["dci", "edi"] {
        for c in MCE {
            out.push((m.to_string(), *c));
        }
    }
    out
}

pub fn parse_metric(spec: &str, default_estimator: &EstimatorChoice, joint: &JointPolicy) -> Result<MetricSpec> {
    let spec = spec.trim();
    let (base, est) = match spec.split_once('@') {
        Some((b, e)) => (b, Some(e)),
        None => (spec, None),
    };
    let kind = MetricKind::parse(base).ok_or_else(|| Error::UnknownMetric(spec.to_string()))?;
    let estimator = match est {
        Some(e) if kind.uses_estimator() => e.parse()?,
        Some(_) => {
            return Err(Error::UnknownMetric(format!("{spec} (metric takes no estimator)")));
        }
        None => default_estimator.clone(),
    };
    Ok(MetricSpec {
        name: spec.to_string(),
        kind,
        estimator,
        joint: joint.clone(),
    })
}

impl Metric for MetricSpec {
    fn name(&self) -> &str {
        &self.name
    }

    fn aspects(&self) -> &'static [Component] {
        self.kind.aspects()
    }

    fn components(&self) -> &'static [Component] {
        self.kind.components()
    }

    fn evaluate(&self, cache: &MiCache, seed: u64) -> Result<MetricReport> {
        let seed = mix(seed, hash_str(&self.name));
        let est = self.estimator.with_seed(seed);
        let mut report = MetricReport::new();
        let name = self.name.as_str();
        match self.kind {
            MetricKind::Edi => {
                let cfg = EdiConfig {
                    pairwise: est,
                    joint: self.joint.clone(),
                };
                let im = impact_cached(cache, &cfg)?;
                report.insert(name, Component::Modularity, edi_modularity(&im)?)?;
                report.insert(name, Component::Compactness, edi_compactness(&im)?)?;
                report.insert(name, Component::Explicitness, edi_explicitness(&im)?)?;
            }
            MetricKind::Zdiff | MetricKind::Zmin => {
                let cfg = InterventionConfig {
                    seed,
                    ..InterventionConfig::default()
                };
                let v = if self.kind == MetricKind::Zdiff {
                    zdiff(cache.rep, &cfg)?
                } else {
                    zminvar(cache.rep, &cfg)?
                };
                report.insert(name, Component::Single, v)?;
            }
            MetricKind::Sap => report.insert(name, Component::Single, sap_seeded(cache.rep, seed)?)?,
            MetricKind::Mig => report.insert(name, Component::Single, mig_cached(cache, &est)?)?,
            MetricKind::MigSup => report.insert(name, Component::Single, mig_sup_cached(cache, &est)?)?,
            MetricKind::Modularity => report.insert(name, Component::Single, modularity_cached(cache, &est)?)?,
            MetricKind::Dcimig => report.insert(name, Component::Single, dcimig_cached(cache, &est)?)?,
            MetricKind::Dci | MetricKind::DciForest => {
                let base = if self.kind == MetricKind::Dci {
                    DciConfig::default()
                } else {
                    DciConfig::forest()
                };
                let s = dci_with(cache.rep, &DciConfig { seed, ..base })?;
                report.insert(name, Component::Modularity, s.disentanglement)?;
                report.insert(name, Component::Compactness, s.completeness)?;
                report.insert(name, Component::Explicitness, s.informativeness)?;
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_overrides() {
        let d = EstimatorChoice::DiscretePlugin;
        let m = parse_metric("mig@ksg:5", &d, &JointPolicy::Auto).unwrap();
        assert_eq!(m.kind, MetricKind::Mig);
        assert_eq!(m.estimator, EstimatorChoice::Ksg { k_neighbors: 5 });
        assert_eq!(parse_metric("sap", &d, &JointPolicy::Auto).unwrap().estimator, d);
        assert!(parse_metric("sap@ksg", &d, &JointPolicy::Auto).is_err());
        assert!(parse_metric("bogus", &d, &JointPolicy::Auto).is_err());
    }

    #[test]
    fn reference_set_has_twelve_entries() {
        assert_eq!(reference_metric_set().len(), 12);
    }
}
