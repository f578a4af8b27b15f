//! Subcommand implementations. Each returns the process exit status on
//! success paths; failures carry their own status via [`CliError`].

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use recourse_cost::rng::substream_seed;
use recourse_cost::{
    compare_recourses, draw_true_strengths, expand_recourse_comparisons, map_estimate,
    run_pairwise_experiment, run_recourse_experiment, simulate_pairwise_survey,
    simulate_recourse_survey, CostVector, Easier, EstimatorConfig, ExperimentReport,
    FeatureCatalog, LabelMode, McSettings, PairwiseSimConfig, RecourseSimConfig,
};
use serde::Serialize;
use thiserror::Error;

use crate::formats::{self, split_set, Format, FormatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] recourse_cost::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(recourse_cost::Error::NonIdentifiable) => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        }
    }
}

pub type CliResult = Result<i32, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelModeArg {
    Bernoulli,
    Deterministic,
}

impl From<LabelModeArg> for LabelMode {
    fn from(m: LabelModeArg) -> Self {
        match m {
            LabelModeArg::Bernoulli => LabelMode::Bernoulli,
            LabelModeArg::Deterministic => LabelMode::Deterministic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurveyKind {
    Pairwise,
    Recourse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Pairwise surveys, |F| ∈ {5, 10, 15, 20}.
    Figure2,
    /// Recourse surveys, |F| = 20, sizes 1–6.
    Figure4,
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Args)]
pub struct SimulatePairwiseArgs {
    #[arg(long)]
    pub num_features: usize,
    /// Number of survey records to generate.
    #[arg(long)]
    pub comparisons: usize,
    #[arg(long)]
    pub seed: u64,
    /// Where to write the generating strengths.
    #[arg(long)]
    pub beta_out: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// The generating strengths and the survey use the same substreams as trial
/// 0 of an experiment with this seed.
pub fn simulate_pairwise(args: &SimulatePairwiseArgs, format: Format) -> CliResult {
    let truth = draw_true_strengths(args.num_features, substream_seed(args.seed, 0, 0))?;
    let survey =
        simulate_pairwise_survey(&truth, args.comparisons, substream_seed(args.seed, 0, 1))?;
    formats::write_atomic(
        &args.beta_out,
        &formats::write_vector(truth.catalog(), truth.values(), format),
    )?;
    formats::write_atomic(&args.out, &formats::write_pairwise(&survey, format))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct SimulateRecourseArgs {
    #[arg(long, default_value_t = 20)]
    pub num_features: usize,
    #[arg(long)]
    pub recourse_size: usize,
    #[arg(long)]
    pub comparisons: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "bernoulli")]
    pub label_mode: LabelModeArg,
    #[arg(long)]
    pub beta_out: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn simulate_recourse(args: &SimulateRecourseArgs, format: Format) -> CliResult {
    let truth = draw_true_strengths(args.num_features, substream_seed(args.seed, 0, 0))?;
    let survey = simulate_recourse_survey(
        &truth,
        args.recourse_size,
        args.comparisons,
        args.label_mode.into(),
        substream_seed(args.seed, 0, 1),
    )?;
    formats::write_atomic(
        &args.beta_out,
        &formats::write_vector(truth.catalog(), truth.values(), format),
    )?;
    formats::write_atomic(
        &args.out,
        &formats::write_recourse(&survey, truth.catalog(), format),
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pairwise")]
    pub input_kind: SurveyKind,
    /// Feature list `a;b;c` fixing the catalog. Defaults to first appearance
    /// order in the input.
    #[arg(long)]
    pub features: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub pseudo_count: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Zero-mean strengths.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub costs_out: Option<PathBuf>,
}

pub fn estimate(args: &EstimateArgs, format: Format, stderr: &mut dyn Write) -> CliResult {
    let catalog = match &args.features {
        Some(list) => Some(Arc::new(FeatureCatalog::new(split_set(list))?)),
        None => None,
    };
    let bytes = formats::read_file(&args.input)?;
    let input_format = Format::of_path(&args.input);
    let (dataset, skipped) = match args.input_kind {
        SurveyKind::Pairwise => (formats::read_pairwise(&bytes, input_format, catalog)?, 0),
        SurveyKind::Recourse => {
            let (catalog, records) = formats::read_recourse(&bytes, input_format, catalog)?;
            let expansion = expand_recourse_comparisons(&records, catalog)?;
            (expansion.dataset, expansion.skipped)
        }
    };
    let config = EstimatorConfig {
        pseudo_count: args.pseudo_count,
        tolerance: args.tol,
        max_iterations: args.max_iter,
    };
    let fit = map_estimate(&dataset, &config)?;
    let strengths = &fit.strengths;
    formats::write_atomic(
        &args.out,
        &formats::write_vector(strengths.catalog(), strengths.values(), format),
    )?;
    if let Some(path) = &args.costs_out {
        let costs = strengths.to_costs();
        formats::write_atomic(
            path,
            &formats::write_vector(costs.catalog(), costs.values(), format),
        )?;
    }
    let _ = writeln!(
        stderr,
        "iterations={} converged={} final_delta={:e} log_posterior={} records={} skipped={}",
        fit.iterations,
        fit.converged,
        fit.final_delta,
        fit.log_posterior,
        dataset.len(),
        skipped
    );
    if skipped > 0 {
        let _ = writeln!(
            stderr,
            "warning: skipped {skipped} nested or identical recourse comparisons"
        );
    }
    if fit.converged {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(
            stderr,
            "error: did not converge within {} iterations",
            args.max_iter
        );
        Ok(EXIT_NUMERICAL)
    }
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// `feature,value` costs file.
    #[arg(long)]
    pub costs: PathBuf,
    /// First recourse, `f1;f2`.
    #[arg(long)]
    pub recourse_a: String,
    #[arg(long)]
    pub recourse_b: String,
    /// Estimate by Monte Carlo with this many sampled pairs (needs `--seed`).
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct CompareOutput {
    rho_ab: f64,
    rho_ba: f64,
    easier: &'static str,
}

pub fn compare(args: &CompareArgs, format: Format, stdout: &mut dyn Write) -> CliResult {
    let mc = match (args.mc_samples, args.seed) {
        (Some(samples), Some(seed)) => Some(McSettings { samples, seed }),
        (Some(_), None) => return Err(CliError::Usage("--mc-samples requires --seed".into())),
        (None, _) => None,
    };
    let (catalog, values) = formats::read_vector(
        &formats::read_file(&args.costs)?,
        Format::of_path(&args.costs),
    )?;
    let costs = CostVector::new(Arc::clone(&catalog), values)?;
    let a = catalog.recourse(&split_set(&args.recourse_a))?;
    let b = catalog.recourse(&split_set(&args.recourse_b))?;
    let res = compare_recourses(&a, &b, &costs, mc)?;
    let out = CompareOutput {
        rho_ab: res.rho_12,
        rho_ba: res.rho_21,
        easier: match res.easier {
            Easier::First => "A",
            Easier::Second => "B",
            Easier::Tie => "tie",
        },
    };
    let written = match format {
        Format::Csv => writeln!(
            stdout,
            "rho_ab={} rho_ba={} easier={}",
            out.rho_ab, out.rho_ba, out.easier
        ),
        Format::Json => writeln!(
            stdout,
            "{}",
            serde_json::to_string(&out).expect("plain data")
        ),
    };
    written.map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- experiment

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Fills in kind, sizes and schedule; explicit flags still win.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub kind: Option<SurveyKind>,
    /// Comma-separated feature-set sizes.
    #[arg(long, value_delimiter = ',')]
    pub num_features: Vec<usize>,
    /// Comma-separated recourse sizes (recourse kind only).
    #[arg(long, value_delimiter = ',')]
    pub recourse_size: Vec<usize>,
    /// Comma-separated comparisons per feature; totals are this times |F|.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "bernoulli")]
    pub label_mode: LabelModeArg,
    #[arg(long, default_value_t = 0.1)]
    pub pseudo_count: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub const DEFAULT_SCHEDULE: [usize; 4] = [50, 100, 200, 500];

/// Resolved experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub kind: SurveyKind,
    pub num_features: Vec<usize>,
    pub recourse_sizes: Vec<usize>,
    pub per_feature_schedule: Vec<usize>,
}

impl ExperimentArgs {
    pub fn plan(&self) -> Result<ExperimentPlan, CliError> {
        let (kind, features, sizes) = match self.preset {
            Some(Preset::Figure2) => (SurveyKind::Pairwise, vec![5, 10, 15, 20], vec![1]),
            Some(Preset::Figure4) => (SurveyKind::Recourse, vec![20], (1..=6).collect()),
            None => {
                let kind = self.kind.ok_or_else(|| {
                    CliError::Usage("either --preset or --kind is required".into())
                })?;
                (kind, vec![20], vec![1])
            }
        };
        let kind = self.kind.unwrap_or(kind);
        let pick = |given: &Vec<usize>, default: Vec<usize>| {
            if given.is_empty() {
                default
            } else {
                given.clone()
            }
        };
        let recourse_sizes = match kind {
            SurveyKind::Pairwise if !self.recourse_size.is_empty() => {
                return Err(CliError::Usage(
                    "--recourse-size only applies to --kind recourse".into(),
                ))
            }
            SurveyKind::Pairwise => vec![1],
            SurveyKind::Recourse => pick(&self.recourse_size, sizes),
        };
        Ok(ExperimentPlan {
            kind,
            num_features: pick(&self.num_features, features),
            recourse_sizes,
            per_feature_schedule: pick(&self.schedule, DEFAULT_SCHEDULE.to_vec()),
        })
    }
}

pub fn run_plan(
    plan: &ExperimentPlan,
    args: &ExperimentArgs,
) -> Result<ExperimentReport, CliError> {
    let estimator = EstimatorConfig {
        pseudo_count: args.pseudo_count,
        ..EstimatorConfig::default()
    };
    let mut report = ExperimentReport::default();
    for &nf in &plan.num_features {
        let schedule: Vec<usize> = plan.per_feature_schedule.iter().map(|c| c * nf).collect();
        match plan.kind {
            SurveyKind::Pairwise => report.extend(run_pairwise_experiment(&PairwiseSimConfig {
                num_features: nf,
                comparisons_schedule: schedule,
                trials: args.trials,
                seed: args.seed,
                estimator,
            })?),
            SurveyKind::Recourse => {
                for &size in &plan.recourse_sizes {
                    report.extend(run_recourse_experiment(&RecourseSimConfig {
                        num_features: nf,
                        recourse_size: size,
                        comparisons_schedule: schedule.clone(),
                        trials: args.trials,
                        seed: args.seed,
                        label_mode: args.label_mode.into(),
                        estimator,
                    })?)
                }
            }
        }
    }
    Ok(report)
}

pub fn experiment(args: &ExperimentArgs, format: Format, stderr: &mut dyn Write) -> CliResult {
    let plan = args.plan()?;
    let report = run_plan(&plan, args)?;
    formats::write_atomic(&args.out, &formats::write_experiment(&report.rows, format))?;
    let nc = report.non_converged();
    let _ = writeln!(stderr, "rows={} non_converged={nc}", report.rows.len());
    Ok(EXIT_OK)
}
