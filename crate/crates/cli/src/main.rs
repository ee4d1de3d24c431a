//! `edibench`: score representations and run the synthetic experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use edi_core::estimators::EstimatorChoice;
use edi_core::harness::{
    aggregate, agreement_matrix, alpha_grid, derive_seeds, metric_label, run_experiment, sample_efficiency,
    time_complexity, write_agreement_csv, write_error_log, ExperimentConfig, ExperimentKind, InputFile, RunOutput,
};
use edi_core::io::{kinds_path_for, read_representation_csv, write_representation_csv, write_results_csv};
use edi_core::metrics::{impact_intensity_with, reference_metric_set, EdiConfig, EdiDiagnostics, JointPolicy, Metric};
use edi_core::synth::{gen_boundary, gen_sweep, BoundaryCase, Family, SweepSpec};
use edi_core::{Component, Error, ResultRow};

const SEED_ENV: &str = "EDIBENCH_SEED";

#[derive(Parser, Debug)]
#[command(name = "edibench", version, about = "Disentanglement metrics and synthetic benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score the eight boundary-case representations.
    Calibrate(CalibrateArgs),
    /// Sweep a controlled corruption over an alpha grid.
    Sweep(SweepArgs),
    /// Score drift on subsets and wall-time scaling with sample size.
    Efficiency(EfficiencyArgs),
    /// Rank agreement between metrics over a directory of representations.
    Agree(AgreeArgs),
    /// Score a single representation file.
    Score(ScoreArgs),
    /// Write a synthetic representation to CSV.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Samples per representation [default: 20000; 100000 for efficiency]
    #[arg(long)]
    n: Option<usize>,
    /// Representations per alpha value [default: 5 for sweeps, 1 otherwise]
    #[arg(long)]
    reps: Option<usize>,
    /// Number of random seeds derived from the master seed [default: 10]
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated metrics; `all` expands to every metric; `name@estimator` overrides the estimator
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// MI estimator: discrete | binned[:B] | ksg[:K] | dv [default: discrete for calibrate, ksg:3 otherwise]
    #[arg(long, value_parser = parse_estimator)]
    estimator: Option<EstimatorChoice>,
    /// Joint MI policy for EDI: auto, or any estimator spec
    #[arg(long, default_value = "auto", value_parser = parse_joint)]
    joint: JointPolicy,
    /// Results CSV path
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Full-size settings: N=50000 (calibrate) or 20000 (sweeps), 50 reps, 50 seeds
    #[arg(long)]
    paper_scale: bool,
    /// Master seed; the EDIBENCH_SEED environment variable takes precedence
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated case codes such as 000,111 [default: all eight]
    #[arg(long, value_delimiter = ',', value_parser = parse_case)]
    cases: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Corruption family
    #[arg(long, value_parser = ["nonlinear", "rotation", "noise"])]
    family: String,
    /// Inclusive alpha grid lo:hi:step [default: 0:0.5:0.1 for rotation, 0:1:0.2 otherwise]
    #[arg(long, value_parser = parse_alphas)]
    alphas: Option<AlphaGrid>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EfficiencyArgs {
    #[command(flatten)]
    common: Common,
    /// Subset sizes compared against the full sample
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    sizes: Vec<usize>,
    /// Sample sizes for wall-time scaling; must be strictly increasing, at least 3
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    timing_sizes: Vec<usize>,
    /// Skip the timing measurements
    #[arg(long)]
    no_timing: bool,
    /// Boundary case used for both measurements
    #[arg(long, default_value = "111", value_parser = parse_case)]
    case: String,
}

#[derive(Args, Debug)]
struct AgreeArgs {
    /// Directory of representation CSVs, each with a `<stem>.kinds.json` sidecar
    #[arg(long)]
    input_dir: PathBuf,
    /// Agreement matrix CSV [default: <out stem>.agreement.csv]
    #[arg(long)]
    agreement_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Representation CSV with header z0..,c0..
    #[arg(long)]
    input: PathBuf,
    /// Factor kinds JSON [default: <input stem>.kinds.json]
    #[arg(long)]
    kinds: Option<PathBuf>,
    /// Also write EDI diagnostics (impact matrix and per-code scores) as JSON
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Boundary case code, e.g. 101
    #[arg(long, value_parser = parse_case, conflicts_with = "family")]
    case: Option<String>,
    /// Sweep family
    #[arg(long, value_parser = ["nonlinear", "rotation", "noise"])]
    family: Option<String>,
    /// Alpha for sweep families
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Samples
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    /// Seed; the EDIBENCH_SEED environment variable takes precedence
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    /// Output CSV; kinds go to <stem>.kinds.json
    #[arg(long, default_value = "representation.csv")]
    out: PathBuf,
}

fn parse_estimator(s: &str) -> Result<EstimatorChoice, String> {
    let e: EstimatorChoice = s.parse().map_err(|e: Error| e.to_string())?;
    e.validate().map_err(|e| e.to_string())?;
    Ok(e)
}

fn parse_joint(s: &str) -> Result<JointPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_case(s: &str) -> Result<String, String> {
    if s.len() == 3 && s.chars().all(|c| c == '0' || c == '1') {
        Ok(s.to_string())
    } else {
        Err(format!("`{s}` is not a three-digit 0/1 case code"))
    }
}

#[derive(Clone, Debug)]
struct AlphaGrid(Vec<f64>);

fn parse_alphas(s: &str) -> Result<AlphaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = match nums.as_slice() {
        [a] => (*a, *a, 1.0),
        [lo, hi, step] => (*lo, *hi, *step),
        _ => return Err("expected lo:hi:step".into()),
    };
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi < lo {
        return Err("alphas must satisfy 0 <= lo <= hi <= 1".into());
    }
    if !(step > 0.0) {
        return Err("step must be positive".into());
    }
    Ok(AlphaGrid(alpha_grid(lo, hi, step)))
}

/// Errors split by exit code: usage (1) and runtime (2).
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn master_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn build_config(kind: ExperimentKind, c: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::desk(kind);
    let mut seeds = 10;
    if c.paper_scale {
        cfg.n = if kind == ExperimentKind::Calibrate { 50_000 } else { 20_000 };
        if matches!(kind, ExperimentKind::Nonlinear | ExperimentKind::Rotation | ExperimentKind::Noise) {
            cfg.reps_per_alpha = 50;
        }
        seeds = 50;
    }
    if kind == ExperimentKind::Calibrate {
        cfg.metrics = vec!["all".into(), "dci_rf".into()];
    }
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if let Some(r) = c.reps {
        cfg.reps_per_alpha = r;
    }
    if let Some(s) = c.seeds {
        seeds = s;
    }
    if seeds == 0 {
        return Err(Failure::Usage("--seeds must be at least 1".into()));
    }
    cfg.seeds = derive_seeds(master_seed(c.master_seed)?, seeds);
    if let Some(m) = &c.metrics {
        cfg.metrics = m.clone();
    }
    if let Some(e) = &c.estimator {
        cfg.estimator = e.clone();
    }
    cfg.joint = c.joint.clone();
    cfg.output_path = c.out.clone();
    cfg.jobs = match c.jobs {
        Some(0) => return Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(j) => j,
        None => 0,
    };
    Ok(cfg)
}

fn finish_run(out: &RunOutput, path: &Path) -> Result<(), Failure> {
    if out.rows.is_empty() && !out.errors.is_empty() {
        let first = &out.errors[0];
        return Err(Failure::Runtime(anyhow::anyhow!(
            "every evaluation failed ({} errors); first: {first}",
            out.errors.len()
        )));
    }
    write_results_csv(&out.rows, path).with_context(|| format!("writing {}", path.display()))?;
    if let Some(log) = write_error_log(&out.errors, path)? {
        eprintln!("{} evaluations failed; see {}", out.errors.len(), log.display());
    }
    print_summary(&out.rows);
    eprintln!("wrote {} rows to {}", out.rows.len(), path.display());
    Ok(())
}

fn print_summary(rows: &[ResultRow]) {
    for cell in aggregate(rows) {
        println!(
            "{:<18} alpha={:<5} {:<16} {:<6} mean={:.4} std={:.4} n={}",
            cell.experiment, cell.alpha, cell.metric, cell.component, cell.mean, cell.std, cell.count
        );
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Calibrate(a) => {
            let mut cfg = build_config(ExperimentKind::Calibrate, &a.common)?;
            if let Some(cases) = &a.cases {
                cfg.cases = cases.iter().map(|c| BoundaryCase::new(c)).collect();
            }
            cfg.validate().map_err(usage)?;
            let out = run_experiment(&cfg)?;
            finish_run(&out, &cfg.output_path)
        }
        Command::Sweep(a) => {
            let family: Family = a.family.parse().map_err(usage)?;
            let kind = match family {
                Family::Nonlinear => ExperimentKind::Nonlinear,
                Family::Rotation => ExperimentKind::Rotation,
                Family::Noise => ExperimentKind::Noise,
            };
            let mut cfg = build_config(kind, &a.common)?;
            if let Some(al) = a.alphas {
                cfg.alphas = al.0;
            }
            cfg.validate().map_err(usage)?;
            let out = run_experiment(&cfg)?;
            finish_run(&out, &cfg.output_path)
        }
        Command::Efficiency(a) => {
            let mut cfg = build_config(ExperimentKind::Efficiency, &a.common)?;
            cfg.cases = vec![BoundaryCase::new(&a.case)];
            if a.common.seeds.is_none() && !a.common.paper_scale {
                cfg.seeds.truncate(3);
            }
            cfg.validate().map_err(usage)?;
            if let Some(&m) = a.sizes.iter().find(|&&m| m < 2 || m > cfg.n) {
                return Err(Failure::Usage(format!("--sizes: {m} is outside [2, --n = {}]", cfg.n)));
            }
            let ts = &a.timing_sizes;
            if !a.no_timing && (ts.len() < 3 || ts.windows(2).any(|w| w[0] >= w[1])) {
                return Err(Failure::Usage(
                    "--timing-sizes must be strictly increasing with at least 3 entries".into(),
                ));
            }
            let mut out = sample_efficiency(&cfg, &a.sizes)?;
            if !a.no_timing {
                out.rows.extend(time_complexity(&cfg, ts)?);
            }
            finish_run(&out, &cfg.output_path)
        }
        Command::Agree(a) => {
            let mut cfg = build_config(ExperimentKind::Agree, &a.common)?;
            cfg.inputs = list_inputs(&a.input_dir)?;
            if a.common.metrics.is_none() {
                let mut names: Vec<String> = reference_metric_set().into_iter().map(|(m, _)| m).collect();
                names.dedup();
                cfg.metrics = names;
            }
            cfg.validate().map_err(usage)?;
            let keys: Vec<(String, Component)> = if a.common.metrics.is_none() {
                reference_metric_set()
            } else {
                cfg.metric_specs()
                    .map_err(usage)?
                    .iter()
                    .flat_map(|m| m.components().iter().map(|c| (m.name().to_string(), *c)).collect::<Vec<_>>())
                    .collect()
            };
            for f in &cfg.inputs {
                read_representation_csv(&f.csv, &f.kinds)?;
            }
            let out = run_experiment(&cfg)?;
            let matrix = agreement_matrix(&out.reports, &keys)?;
            let labels: Vec<String> = keys.iter().map(|(m, c)| metric_label(m, *c)).collect();
            let agree_path = a.agreement_out.unwrap_or_else(|| cfg.output_path.with_extension("agreement.csv"));
            finish_run(&out, &cfg.output_path)?;
            write_agreement_csv(&matrix, &labels, &agree_path)?;
            eprintln!("wrote agreement matrix to {}", agree_path.display());
            Ok(())
        }
        Command::Score(a) => {
            let mut cfg = build_config(ExperimentKind::Score, &a.common)?;
            let kinds = a.kinds.clone().unwrap_or_else(|| kinds_path_for(&a.input));
            cfg.inputs = vec![InputFile {
                csv: a.input.clone(),
                kinds: kinds.clone(),
            }];
            cfg.validate().map_err(usage)?;
            let rep = read_representation_csv(&a.input, &kinds)?;
            let out = run_experiment(&cfg)?;
            finish_run(&out, &cfg.output_path)?;
            if let Some(path) = a.diagnostics {
                let ecfg = EdiConfig {
                    pairwise: cfg.estimator.clone(),
                    joint: cfg.joint.clone(),
                };
                let im = impact_intensity_with(&rep, &ecfg)?;
                let json = EdiDiagnostics::from_matrix(&im, &ecfg)?.to_json()?;
                std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        Command::Gen(a) => {
            let seed = master_seed(a.master_seed)?;
            let rep = match (&a.case, &a.family) {
                (Some(c), None) => gen_boundary(&BoundaryCase::new(c), a.n, seed)?,
                (None, Some(f)) => {
                    if !(0.0..=1.0).contains(&a.alpha) {
                        return Err(Failure::Usage("--alpha must lie in [0,1]".into()));
                    }
                    let family: Family = f.parse().map_err(usage)?;
                    gen_sweep(&SweepSpec {
                        n: a.n,
                        ..SweepSpec::new(family, a.alpha, seed)
                    })?
                }
                _ => return Err(Failure::Usage("gen needs exactly one of --case or --family".into())),
            };
            let kinds = kinds_path_for(&a.out);
            write_representation_csv(&rep, &a.out, &kinds)?;
            eprintln!("wrote {} and {}", a.out.display(), kinds.display());
            Ok(())
        }
    }
}

/// Representation CSVs in a directory, sorted by name, each paired with its kinds sidecar.
fn list_inputs(dir: &Path) -> Result<Vec<InputFile>, Failure> {
    let entries = std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    let mut csvs: Vec<PathBuf> = Vec::new();
    for e in entries {
        let p = e.with_context(|| format!("reading directory {}", dir.display()))?.path();
        let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
        if name.ends_with(".csv") && !name.ends_with(".agreement.csv") {
            csvs.push(p);
        }
    }
    csvs.sort();
    if csvs.len() < 2 {
        return Err(Failure::Runtime(anyhow::anyhow!(
            "{} holds {} representation CSVs; agreement needs at least 2",
            dir.display(),
            csvs.len()
        )));
    }
    Ok(csvs
        .into_iter()
        .map(|csv| InputFile {
            kinds: kinds_path_for(&csv),
            csv,
        })
        .collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
