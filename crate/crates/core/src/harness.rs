//! Experiment orchestration: sweeps, calibration, scoring of ingested files,
//! aggregation, sample efficiency, timing and metric agreement.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorChoice;
use crate::io::read_representation_csv;
use crate::matrix::Matrix;
use crate::metrics::{all_metric_names, parse_metric, JointPolicy, Metric, MetricSpec, MiCache};
use crate::repr::{Component, MetricReport, Representation, ResultRow};
use crate::seed::{cell_seed, mix};
use crate::synth::{gen_boundary, gen_sweep, subsample, BoundaryCase, Family, SweepSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    Calibrate,
    Nonlinear,
    Rotation,
    Noise,
    Efficiency,
    Agree,
    Score,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Calibrate => "calibrate",
            ExperimentKind::Nonlinear => "nonlinear",
            ExperimentKind::Rotation => "rotation",
            ExperimentKind::Noise => "noise",
            ExperimentKind::Efficiency => "efficiency",
            ExperimentKind::Agree => "agree",
            ExperimentKind::Score => "score",
        }
    }

    fn family(&self) -> Option<Family> {
        match self {
            ExperimentKind::Nonlinear => Some(Family::Nonlinear),
            ExperimentKind::Rotation => Some(Family::Rotation),
            ExperimentKind::Noise => Some(Family::Noise),
            _ => None,
        }
    }
}

/// An ingested representation: CSV path plus kinds sidecar path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub csv: PathBuf,
    pub kinds: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub alphas: Vec<f64>,
    pub n: usize,
    pub reps_per_alpha: usize,
    pub seeds: Vec<u64>,
    /// Metric names, possibly with `@estimator` overrides; `all` expands to every metric.
    pub metrics: Vec<String>,
    pub estimator: EstimatorChoice,
    pub joint: JointPolicy,
    pub output_path: PathBuf,
    /// Boundary cases for calibration; the first one is used by efficiency runs.
    pub cases: Vec<BoundaryCase>,
    /// Inputs for `Score` and `Agree`.
    pub inputs: Vec<InputFile>,
    /// Worker threads; 0 means available parallelism.
    pub jobs: usize,
}

impl ExperimentConfig {
    /// Desk-scale defaults for an experiment kind.
    pub fn desk(experiment: ExperimentKind) -> Self {
        let alphas = match experiment {
            ExperimentKind::Rotation => alpha_grid(0.0, 0.5, 0.1),
            ExperimentKind::Nonlinear | ExperimentKind::Noise => alpha_grid(0.0, 1.0, 0.2),
            _ => vec![0.0],
        };
        let (n, reps, estimator) = match experiment {
            ExperimentKind::Calibrate => (20_000, 1, EstimatorChoice::DiscretePlugin),
            ExperimentKind::Efficiency => (100_000, 1, EstimatorChoice::Ksg { k_neighbors: 3 }),
            _ => (20_000, 5, EstimatorChoice::Ksg { k_neighbors: 3 }),
        };
        ExperimentConfig {
            experiment,
            alphas,
            n,
            reps_per_alpha: reps,
            seeds: derive_seeds(0, 10),
            metrics: vec!["all".into()],
            estimator,
            joint: JointPolicy::Auto,
            output_path: PathBuf::from("results.csv"),
            cases: if experiment == ExperimentKind::Efficiency {
                vec![BoundaryCase::new("111")]
            } else {
                BoundaryCase::all()
            },
            inputs: Vec::new(),
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seed list is empty".into()));
        }
        if self.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidConfig("alphas must lie in [0,1]".into()));
        }
        if self.family_needs_alphas() && self.alphas.is_empty() {
            return Err(Error::InvalidConfig("alpha grid is empty".into()));
        }
        if self.reps_per_alpha == 0 || self.n < 2 {
            return Err(Error::InvalidConfig("reps and n must be positive".into()));
        }
        if matches!(self.experiment, ExperimentKind::Score | ExperimentKind::Agree) && self.inputs.is_empty() {
            return Err(Error::InvalidConfig(format!("{} needs input files", self.experiment.as_str())));
        }
        self.estimator.validate()?;
        self.metric_specs()?;
        Ok(())
    }

    fn family_needs_alphas(&self) -> bool {
        self.experiment.family().is_some()
    }

    /// Metric list with `all` expanded, parsed against the default estimator.
    pub fn metric_specs(&self) -> Result<Vec<MetricSpec>> {
        let mut names: Vec<String> = Vec::new();
        for m in &self.metrics {
            if m == "all" {
                names.extend(all_metric_names().into_iter().map(String::from));
            } else {
                names.push(m.clone());
            }
        }
        let mut seen = std::collections::HashSet::new();
        names.retain(|n| seen.insert(n.clone()));
        if names.is_empty() {
            return Err(Error::InvalidConfig("no metrics selected".into()));
        }
        names.iter().map(|n| parse_metric(n, &self.estimator, &self.joint)).collect()
    }
}

/// Inclusive grid lo, lo+step, ..., hi (hi included when step divides the range).
pub fn alpha_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return vec![lo];
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let v = lo + step * i as f64;
            // trim binary noise so grids print as written
            (v * 1e12).round() / 1e12
        })
        .collect()
}

/// `count` seeds derived from a master seed.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| mix(master, i)).collect()
}

/// A failed metric evaluation; these never appear in the results CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CellError {
    pub experiment: String,
    pub alpha: f64,
    pub seed: u64,
    pub rep_index: u64,
    pub metric: String,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} alpha={} seed={} rep={} metric={}: {}",
            self.experiment, self.alpha, self.seed, self.rep_index, self.metric, self.message
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub errors: Vec<CellError>,
    /// Per-representation reports, in cell order (used for agreement analysis).
    pub reports: Vec<MetricReport>,
}

/// One unit of work: a representation to build and score.
struct Cell {
    experiment: String,
    alpha: f64,
    seed: u64,
    rep_index: u64,
    rep_seed: u64,
    source: Source,
}

enum Source {
    Boundary(BoundaryCase),
    Sweep(SweepSpec),
    File(InputFile),
}

struct CellResult {
    rows: Vec<ResultRow>,
    errors: Vec<CellError>,
    report: MetricReport,
}

fn build_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let exp = cfg.experiment.as_str();
    match cfg.experiment {
        ExperimentKind::Calibrate => {
            for &seed in &cfg.seeds {
                for (ci, case) in cfg.cases.iter().enumerate() {
                    for r in 0..cfg.reps_per_alpha as u64 {
                        cells.push(Cell {
                            experiment: format!("calibrate/{}", case.code3),
                            alpha: 0.0,
                            seed,
                            rep_index: r,
                            rep_seed: cell_seed(seed, exp, ci as u64, r),
                            source: Source::Boundary(case.clone()),
                        });
                    }
                }
            }
        }
        ExperimentKind::Nonlinear | ExperimentKind::Rotation | ExperimentKind::Noise => {
            let family = cfg.experiment.family().expect("sweep family");
            for &seed in &cfg.seeds {
                for (ai, &alpha) in cfg.alphas.iter().enumerate() {
                    for r in 0..cfg.reps_per_alpha as u64 {
                        let rep_seed = cell_seed(seed, exp, ai as u64, r);
                        let spec = SweepSpec {
                            n: cfg.n,
                            ..SweepSpec::new(family, alpha, rep_seed)
                        };
                        cells.push(Cell {
                            experiment: exp.to_string(),
                            alpha,
                            seed,
                            rep_index: r,
                            rep_seed,
                            source: Source::Sweep(spec),
                        });
                    }
                }
            }
        }
        ExperimentKind::Score | ExperimentKind::Agree => {
            let seed = cfg.seeds[0];
            for (i, input) in cfg.inputs.iter().enumerate() {
                cells.push(Cell {
                    experiment: exp.to_string(),
                    alpha: 0.0,
                    seed,
                    rep_index: i as u64,
                    rep_seed: cell_seed(seed, exp, 0, i as u64),
                    source: Source::File(input.clone()),
                });
            }
        }
        ExperimentKind::Efficiency => {
            return Err(Error::InvalidConfig(
                "efficiency runs go through sample_efficiency / time_complexity".into(),
            ))
        }
    }
    Ok(cells)
}

fn materialize(cell: &Cell, n: usize) -> Result<Representation> {
    match &cell.source {
        Source::Boundary(case) => gen_boundary(case, n, cell.rep_seed),
        Source::Sweep(spec) => gen_sweep(spec),
        Source::File(f) => {
            let mut rep = read_representation_csv(&f.csv, &f.kinds)?;
            rep.seed = cell.rep_seed;
            Ok(rep)
        }
    }
}

fn run_cell(cell: &Cell, n: usize, metrics: &[MetricSpec]) -> CellResult {
    let mut out = CellResult {
        rows: Vec::new(),
        errors: Vec::new(),
        report: MetricReport::new(),
    };
    let fail = |metric: &str, e: &Error| CellError {
        experiment: cell.experiment.clone(),
        alpha: cell.alpha,
        seed: cell.seed,
        rep_index: cell.rep_index,
        metric: metric.to_string(),
        message: e.to_string(),
    };
    let rep = match materialize(cell, n) {
        Ok(rep) => rep,
        Err(e) => {
            out.errors.push(fail("*", &e));
            return out;
        }
    };
    let alpha = rep.alpha.unwrap_or(cell.alpha);
    let cache = MiCache::new(&rep);
    for m in metrics {
        let start = Instant::now();
        let result = m.evaluate(&cache, cell.rep_seed);
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(report) => {
                for e in report.entries() {
                    out.rows.push(ResultRow {
                        experiment: cell.experiment.clone(),
                        alpha,
                        seed: cell.seed,
                        rep_index: cell.rep_index,
                        metric: e.metric.clone(),
                        component: e.component.to_string(),
                        value: e.value,
                        elapsed_ms,
                    });
                }
                if let Err(e) = out.report.extend(report) {
                    out.errors.push(fail(m.name(), &e));
                }
            }
            Err(e) => out.errors.push(fail(m.name(), &e)),
        }
    }
    out
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Runs every cell of the experiment. Failed metric evaluations are reported in
/// `errors` and omitted from `rows`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let metrics = cfg.metric_specs()?;
    let cells = build_cells(cfg)?;
    let results: Vec<CellResult> =
        pool(cfg.jobs)?.install(|| cells.par_iter().map(|c| run_cell(c, cfg.n, &metrics)).collect());
    let mut out = RunOutput::default();
    for r in results {
        out.rows.extend(r.rows);
        out.errors.extend(r.errors);
        out.reports.push(r.report);
    }
    Ok(out)
}

/// Writes one error per line next to the results file, as `<output>.errors.log`.
pub fn write_error_log(errors: &[CellError], output: &Path) -> Result<Option<PathBuf>> {
    if errors.is_empty() {
        return Ok(None);
    }
    let mut name = output.as_os_str().to_owned();
    name.push(".errors.log");
    let path = PathBuf::from(name);
    let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    for e in errors {
        writeln!(f, "{e}").map_err(|err| Error::io(&path, err))?;
    }
    Ok(Some(path))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub experiment: String,
    pub alpha: f64,
    pub metric: String,
    pub component: String,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Mean and unbiased standard deviation per (experiment, alpha, metric, component).
/// Values are sorted before summation so the result does not depend on row order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateCell> {
    let mut groups: BTreeMap<(String, u64, String, String), Vec<f64>> = BTreeMap::new();
    for r in rows {
        // non-negative floats order like their bit patterns
        let alpha = if r.alpha == 0.0 { 0.0f64 } else { r.alpha };
        groups
            .entry((r.experiment.clone(), alpha.to_bits(), r.metric.clone(), r.component.clone()))
            .or_default()
            .push(r.value);
    }
    groups
        .into_iter()
        .map(|((experiment, alpha, metric, component), mut values)| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                let mut dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
                dev.sort_by(f64::total_cmp);
                (dev.iter().sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            AggregateCell {
                experiment,
                alpha: f64::from_bits(alpha),
                metric,
                component,
                mean,
                std,
                count: n,
            }
        })
        .collect()
}

fn score_rep(metrics: &[MetricSpec], rep: &Representation, seed: u64) -> Vec<(String, Component, Result<f64>)> {
    let cache = MiCache::new(rep);
    let mut out = Vec::new();
    for m in metrics {
        match m.evaluate(&cache, seed) {
            Ok(r) => {
                for e in r.entries() {
                    out.push((e.metric.clone(), e.component, Ok(e.value)));
                }
            }
            Err(e) => {
                let msg = e.to_string();
                for c in m.components() {
                    out.push((m.name.clone(), *c, Err(Error::InvalidConfig(msg.clone()))));
                }
            }
        }
    }
    out
}

/// |score(subset) − score(full)| per metric, component and subset size, averaged
/// over seeds. Rows carry the subset size in `rep_index`.
pub fn sample_efficiency(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<RunOutput> {
    cfg.validate()?;
    let metrics = cfg.metric_specs()?;
    if let Some(&m) = sizes.iter().find(|&&m| m < 2 || m > cfg.n) {
        return Err(Error::TooFewRequested {
            requested: m,
            available: cfg.n,
        });
    }
    let case = cfg.cases.first().cloned().unwrap_or_else(|| BoundaryCase::new("111"));
    let per_seed: Vec<Result<Vec<(usize, String, Component, f64, f64)>>> = pool(cfg.jobs)?.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let rep_seed = cell_seed(seed, "efficiency", 0, 0);
                let full = gen_boundary(&case, cfg.n, rep_seed)?;
                let reference = score_rep(&metrics, &full, rep_seed);
                let mut out = Vec::new();
                for (si, &m) in sizes.iter().enumerate() {
                    // the full size is scored on the full sample itself
                    let sub = if m == cfg.n {
                        full.clone()
                    } else {
                        subsample(&full, m, cell_seed(seed, "efficiency/subset", si as u64, 0))?
                    };
                    let start = Instant::now();
                    let scores = score_rep(&metrics, &sub, rep_seed);
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    for ((name, comp, v), (_, _, r)) in scores.into_iter().zip(&reference) {
                        if let (Ok(v), Ok(r)) = (v, r) {
                            out.push((m, name, comp, (v - r).abs(), ms));
                        }
                    }
                }
                Ok(out)
            })
            .collect()
    });
    let mut sums: BTreeMap<(usize, String, Component), (f64, f64, usize)> = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, r) in per_seed.into_iter().enumerate() {
        match r {
            Ok(items) => {
                for (m, name, comp, diff, ms) in items {
                    let e = sums.entry((m, name, comp)).or_insert((0.0, 0.0, 0));
                    e.0 += diff;
                    e.1 += ms;
                    e.2 += 1;
                }
            }
            Err(e) => errors.push(CellError {
                experiment: "efficiency".into(),
                alpha: 0.0,
                seed: cfg.seeds[i],
                rep_index: 0,
                metric: "*".into(),
                message: e.to_string(),
            }),
        }
    }
    let rows = sums
        .into_iter()
        .map(|((m, metric, comp), (diff, ms, count))| ResultRow {
            experiment: "efficiency".into(),
            alpha: 0.0,
            seed: 0,
            rep_index: m as u64,
            metric,
            component: comp.to_string(),
            value: diff / count as f64,
            elapsed_ms: ms / count as f64,
        })
        .collect();
    Ok(RunOutput {
        rows,
        errors,
        reports: Vec::new(),
    })
}

/// Least-squares slope of ln(time) against ln(size).
pub fn loglog_slope(sizes: &[usize], times: &[f64]) -> f64 {
    let xs: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|&t| t.max(1e-9).ln()).collect();
    let (mx, my) = (crate::ml::mean(&xs), crate::ml::mean(&ys));
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Repeats per timing cell; the median is reported.
pub const TIMING_REPEATS: usize = 3;

/// Median wall time of each metric at each size, plus a fitted log-log slope
/// (component `slope`). Runs sequentially so measurements do not compete.
pub fn time_metrics(
    metrics: &[&dyn Metric],
    sizes: &[usize],
    make_rep: &dyn Fn(usize, usize) -> Result<Representation>,
    seed: u64,
) -> Result<Vec<ResultRow>> {
    if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("timing sizes must be strictly increasing, at least 3".into()));
    }
    let reps: Vec<Representation> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| make_rep(i, s))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for m in metrics {
        let mut medians = Vec::new();
        for (rep, &size) in reps.iter().zip(sizes) {
            let mut times = Vec::with_capacity(TIMING_REPEATS);
            for _ in 0..TIMING_REPEATS {
                // a fresh cache each time so no estimator work is reused
                let cache = MiCache::new(rep);
                let start = Instant::now();
                m.evaluate(&cache, seed)?;
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            times.sort_by(f64::total_cmp);
            let med = times[TIMING_REPEATS / 2];
            medians.push(med);
            rows.push(ResultRow {
                experiment: "time".into(),
                alpha: 0.0,
                seed,
                rep_index: size as u64,
                metric: m.name().to_string(),
                component: "time_ms".into(),
                value: med,
                elapsed_ms: med,
            });
        }
        rows.push(ResultRow {
            experiment: "time".into(),
            alpha: 0.0,
            seed,
            rep_index: 0,
            metric: m.name().to_string(),
            component: "slope".into(),
            value: loglog_slope(sizes, &medians),
            elapsed_ms: medians.iter().sum(),
        });
    }
    Ok(rows)
}

/// Timing over boundary-case representations of each size.
pub fn time_complexity(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let specs = cfg.metric_specs()?;
    let metrics: Vec<&dyn Metric> = specs.iter().map(|m| m as &dyn Metric).collect();
    let case = cfg.cases.first().cloned().unwrap_or_else(|| BoundaryCase::new("111"));
    let seed = cfg.seeds[0];
    let make = |i: usize, size: usize| gen_boundary(&case, size, cell_seed(seed, "time", i as u64, 0));
    time_metrics(&metrics, sizes, &make, seed)
}

/// Mid-ranks (ties share the average of their positions, 1-based).
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            ranks[p] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of mid-ranks.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: a.len() });
    }
    let (ra, rb) = (mid_ranks(a), mid_ranks(b));
    let (ma, mb) = (crate::ml::mean(&ra), crate::ml::mean(&rb));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Label such as `edi/mod` for a (metric, component) pair.
pub fn metric_label(metric: &str, component: Component) -> String {
    format!("{metric}/{component}")
}

/// Pairwise Spearman correlation of metric scores across representations.
pub fn agreement_matrix(reports: &[MetricReport], keys: &[(String, Component)]) -> Result<Matrix> {
    if reports.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: reports.len() });
    }
    let series: Vec<Vec<f64>> = keys
        .iter()
        .map(|(m, c)| {
            reports
                .iter()
                .map(|r| r.get(m, *c).ok_or_else(|| Error::MissingMetric(metric_label(m, *c))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let p = keys.len();
    let mut out = Matrix::zeros(p, p);
    for a in 0..p {
        out.set(a, a, 1.0);
        for b in a + 1..p {
            let rho = spearman_rho(&series[a], &series[b])?;
            out.set(a, b, rho);
            out.set(b, a, rho);
        }
    }
    Ok(out)
}

/// Agreement matrix as CSV with labels in the header and the first column.
pub fn write_agreement_csv(m: &Matrix, labels: &[String], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec!["metric".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(alpha_grid(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(alpha_grid(0.0, 0.5, 0.1).len(), 6);
        assert_eq!(alpha_grid(0.0, 1.0, 0.2)[3], 0.6);
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(spearman_rho(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance)));
        assert!(matches!(spearman_rho(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch(1, 2))));
    }

    #[test]
    fn ties_get_mid_ranks() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn slope_of_power_law() {
        let sizes = [10, 100, 1000];
        let t: Vec<f64> = sizes.iter().map(|&s| (s as f64).powf(1.3)).collect();
        assert!((loglog_slope(&sizes, &t) - 1.3).abs() < 1e-9);
    }
}
