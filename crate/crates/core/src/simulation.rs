//! Synthetic surveys and the parameter-recovery experiments.
//!
//! Seeding layout for one experiment with master seed `s`:
//!
//! * trial `t` draws its true strengths from `substream_seed(s, t, 0)`;
//! * schedule point `i` of trial `t` draws a fresh survey from
//!   `substream_seed(s, t, i + 1)`.
//!
//! Pairwise surveys and size-1 recourse surveys consume their generators
//! identically, so the two experiments agree bit-for-bit on shared seeds.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{ComparisonDataset, PairwiseComparison, RecourseComparison};
use crate::error::{Error, Result};
use crate::inference::{expand_recourse_comparisons, map_estimate, EstimatorConfig};
use crate::probability::{logistic, recourse_prob};
use crate::rng::{rng_from_seed, substream_seed, SimRng};
use crate::types::{FeatureCatalog, Recourse, StrengthVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Winner drawn with probability ρ.
    #[default]
    Bernoulli,
    /// Winner is R1 iff ρ ≥ 0.5.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseSimConfig {
    pub num_features: usize,
    /// Total comparisons at each measurement point, strictly increasing.
    pub comparisons_schedule: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecourseSimConfig {
    pub num_features: usize,
    pub recourse_size: usize,
    /// Total recourse comparisons at each measurement point.
    pub comparisons_schedule: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub label_mode: LabelMode,
    #[serde(default)]
    pub estimator: EstimatorConfig,
}

impl RecourseSimConfig {
    /// `|F| = 20` with Bernoulli labels and the default estimator.
    pub fn new(
        recourse_size: usize,
        comparisons_schedule: Vec<usize>,
        trials: usize,
        seed: u64,
    ) -> Self {
        RecourseSimConfig {
            num_features: 20,
            recourse_size,
            comparisons_schedule,
            trials,
            seed,
            label_mode: LabelMode::Bernoulli,
            estimator: EstimatorConfig::default(),
        }
    }
}

fn validate_common(
    num_features: usize,
    schedule: &[usize],
    trials: usize,
    estimator: &EstimatorConfig,
) -> Result<()> {
    if num_features < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 features, got {num_features}"
        )));
    }
    if schedule.is_empty() {
        return Err(Error::invalid("comparison schedule is empty"));
    }
    if schedule[0] == 0 {
        return Err(Error::invalid("schedule entries must be positive"));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "comparison schedule must be strictly increasing",
        ));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    estimator.validate()
}

fn check_recourse_size(num_features: usize, recourse_size: usize) -> Result<()> {
    if recourse_size == 0 {
        return Err(Error::invalid("recourse size must be at least 1"));
    }
    if 2 * recourse_size > num_features {
        return Err(Error::invalid(format!(
            "cannot draw two disjoint recourses of size {recourse_size} from {num_features} features"
        )));
    }
    Ok(())
}

impl PairwiseSimConfig {
    pub fn validate(&self) -> Result<()> {
        validate_common(
            self.num_features,
            &self.comparisons_schedule,
            self.trials,
            &self.estimator,
        )
    }
}

impl RecourseSimConfig {
    pub fn validate(&self) -> Result<()> {
        validate_common(
            self.num_features,
            &self.comparisons_schedule,
            self.trials,
            &self.estimator,
        )?;
        check_recourse_size(self.num_features, self.recourse_size)
    }
}

/// One measurement: a fit on a fresh survey of `total_comparisons` records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub trial: usize,
    pub num_features: usize,
    /// 1 for pairwise experiments.
    pub recourse_size: usize,
    pub total_comparisons: usize,
    pub comparisons_per_feature: f64,
    pub mse: f64,
    /// Wall-clock time for the whole measurement point: drawing the survey,
    /// expanding it when recourse-level, and fitting.
    pub runtime_ms: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn extend(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
    }

    pub fn non_converged(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged).count()
    }
}

/// True strengths i.i.d. uniform on `[0, 1)` over the catalog `f0…`.
pub fn draw_true_strengths(num_features: usize, seed: u64) -> Result<StrengthVector> {
    let catalog = Arc::new(FeatureCatalog::numbered(num_features)?);
    let mut rng = rng_from_seed(seed);
    let values = (0..num_features).map(|_| rng.gen::<f64>()).collect();
    StrengthVector::new(catalog, values)
}

/// Draws `2 * size` distinct indices (partial Fisher-Yates over `0..n`) and
/// splits them into two disjoint halves.
fn sample_disjoint(
    rng: &mut SimRng,
    scratch: &mut Vec<usize>,
    n: usize,
    size: usize,
) -> (Vec<usize>, Vec<usize>) {
    scratch.clear();
    scratch.extend(0..n);
    for i in 0..2 * size {
        let j = rng.gen_range(i..n);
        scratch.swap(i, j);
    }
    (scratch[..size].to_vec(), scratch[size..2 * size].to_vec())
}

/// Pairwise survey: uniform unordered pair, winner drawn from the
/// Bradley-Terry probability. All weights are 1.
pub fn simulate_pairwise_survey(
    beta: &StrengthVector,
    num_comparisons: usize,
    seed: u64,
) -> Result<ComparisonDataset> {
    if num_comparisons == 0 {
        return Err(Error::invalid("need at least one comparison"));
    }
    let n = beta.len();
    let b = beta.values();
    let mut rng = rng_from_seed(seed);
    let mut scratch = Vec::with_capacity(n);
    let mut dataset = ComparisonDataset::new(Arc::clone(beta.catalog()));
    for _ in 0..num_comparisons {
        let (f, g) = sample_disjoint(&mut rng, &mut scratch, n, 1);
        let (f, g) = (f[0], g[0]);
        let record = if rng.gen::<f64>() < logistic(b[f] - b[g]) {
            PairwiseComparison::new(f, g, 1.0)?
        } else {
            PairwiseComparison::new(g, f, 1.0)?
        };
        dataset.push(record)?;
    }
    Ok(dataset)
}

/// Recourse survey: two disjoint recourses of `recourse_size` features per
/// record, labelled from their recourse probability.
pub fn simulate_recourse_survey(
    beta: &StrengthVector,
    recourse_size: usize,
    num_comparisons: usize,
    label_mode: LabelMode,
    seed: u64,
) -> Result<Vec<RecourseComparison>> {
    let n = beta.len();
    check_recourse_size(n, recourse_size)?;
    if num_comparisons == 0 {
        return Err(Error::invalid("need at least one comparison"));
    }
    let mut rng = rng_from_seed(seed);
    let mut scratch = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(num_comparisons);
    for _ in 0..num_comparisons {
        let (a, b) = sample_disjoint(&mut rng, &mut scratch, n, recourse_size);
        let r1 = Recourse::from_indices(a, n)?;
        let r2 = Recourse::from_indices(b, n)?;
        let rho = recourse_prob(&r1, &r2, beta)?;
        let first_wins = match label_mode {
            LabelMode::Bernoulli => rng.gen::<f64>() < rho,
            LabelMode::Deterministic => rho >= 0.5,
        };
        out.push(if first_wins {
            RecourseComparison::new(r1, r2)?
        } else {
            RecourseComparison::new(r2, r1)?
        });
    }
    Ok(out)
}

/// Mean squared difference after centering both vectors.
pub fn centered_mse(estimate: &StrengthVector, truth: &StrengthVector) -> Result<f64> {
    if estimate.catalog() != truth.catalog() {
        return Err(Error::CatalogMismatch(
            "estimate and truth use different feature catalogs".into(),
        ));
    }
    let (me, mt) = (estimate.mean(), truth.mean());
    let sum: f64 = estimate
        .values()
        .iter()
        .zip(truth.values())
        .map(|(e, t)| {
            let d = (e - me) - (t - mt);
            d * d
        })
        .sum();
    Ok(sum / estimate.len() as f64)
}

fn fit_and_score(
    dataset: &ComparisonDataset,
    truth: &StrengthVector,
    estimator: &EstimatorConfig,
) -> Result<(f64, bool)> {
    let fit = map_estimate(dataset, estimator)?;
    Ok((centered_mse(&fit.strengths, truth)?, fit.converged))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Recovery error and runtime against survey size, pairwise surveys.
pub fn run_pairwise_experiment(config: &PairwiseSimConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.trials * config.comparisons_schedule.len());
    for trial in 0..config.trials {
        let truth = draw_true_strengths(
            config.num_features,
            substream_seed(config.seed, trial as u64, 0),
        )?;
        for (i, &total) in config.comparisons_schedule.iter().enumerate() {
            let seed = substream_seed(config.seed, trial as u64, i as u64 + 1);
            let start = Instant::now();
            let dataset = simulate_pairwise_survey(&truth, total, seed)?;
            let (mse, converged) = fit_and_score(&dataset, &truth, &config.estimator)?;
            let runtime_ms = elapsed_ms(start);
            rows.push(ExperimentRow {
                trial,
                num_features: config.num_features,
                recourse_size: 1,
                total_comparisons: total,
                comparisons_per_feature: total as f64 / config.num_features as f64,
                mse,
                runtime_ms,
                converged,
            });
        }
    }
    Ok(ExperimentReport { rows })
}

/// Recovery error and runtime against survey size, recourse-level surveys
/// expanded to weighted pairwise records before fitting.
pub fn run_recourse_experiment(config: &RecourseSimConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.trials * config.comparisons_schedule.len());
    for trial in 0..config.trials {
        let truth = draw_true_strengths(
            config.num_features,
            substream_seed(config.seed, trial as u64, 0),
        )?;
        for (i, &total) in config.comparisons_schedule.iter().enumerate() {
            let seed = substream_seed(config.seed, trial as u64, i as u64 + 1);
            let start = Instant::now();
            let survey = simulate_recourse_survey(
                &truth,
                config.recourse_size,
                total,
                config.label_mode,
                seed,
            )?;
            let expansion = expand_recourse_comparisons(&survey, Arc::clone(truth.catalog()))?;
            let (mse, converged) = fit_and_score(&expansion.dataset, &truth, &config.estimator)?;
            let runtime_ms = elapsed_ms(start);
            rows.push(ExperimentRow {
                trial,
                num_features: config.num_features,
                recourse_size: config.recourse_size,
                total_comparisons: total,
                comparisons_per_feature: total as f64 / config.num_features as f64,
                mse,
                runtime_ms,
                converged,
            });
        }
    }
    Ok(ExperimentReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::empirical_pair_prob;

    #[test]
    fn true_strengths_are_reproducible_and_in_range() {
        let a = draw_true_strengths(50, 3).unwrap();
        assert_eq!(a, draw_true_strengths(50, 3).unwrap());
        assert_ne!(a, draw_true_strengths(50, 4).unwrap());
        assert!(a.values().iter().all(|&v| (0.0..1.0).contains(&v)));
        assert!(draw_true_strengths(1, 0).is_err());
    }

    #[test]
    fn true_strength_mean() {
        let b = draw_true_strengths(10_000, 17).unwrap();
        assert!((b.mean() - 0.5).abs() < 0.02);
    }

    #[test]
    fn pairwise_survey_is_deterministic() {
        let beta = draw_true_strengths(6, 1).unwrap();
        let a = simulate_pairwise_survey(&beta, 300, 9).unwrap();
        assert_eq!(a, simulate_pairwise_survey(&beta, 300, 9).unwrap());
        assert_ne!(a, simulate_pairwise_survey(&beta, 300, 10).unwrap());
        assert_eq!(a.len(), 300);
        assert!(simulate_pairwise_survey(&beta, 0, 9).is_err());
    }

    #[test]
    fn pairwise_labels_follow_bradley_terry() {
        let cat = Arc::new(FeatureCatalog::numbered(2).unwrap());
        let beta = StrengthVector::new(cat, vec![10f64.ln(), 0.0]).unwrap();
        let ds = simulate_pairwise_survey(&beta, 10_000, 77).unwrap();
        let p = empirical_pair_prob(&ds, "f0", "f1").unwrap();
        assert!((p - 10.0 / 11.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn equal_strengths_split_wins_evenly() {
        let beta = StrengthVector::zeros(Arc::new(FeatureCatalog::numbered(5).unwrap()));
        let ds = simulate_pairwise_survey(&beta, 5_000, 5).unwrap();
        let t = ds.tallies();
        for f in 0..5 {
            let appearances: f64 = (0..5).filter(|&g| g != f).map(|g| t.compared(f, g)).sum();
            let tol = 4.0 * (appearances / 4.0).sqrt();
            assert!((t.total_wins(f) - appearances / 2.0).abs() <= tol);
        }
    }

    #[test]
    fn recourse_survey_contract() {
        let beta = draw_true_strengths(20, 2).unwrap();
        for size in 1..=6 {
            let s = simulate_recourse_survey(&beta, size, 200, LabelMode::Bernoulli, 4).unwrap();
            assert_eq!(s.len(), 200);
            for rec in &s {
                assert_eq!(rec.winner().len(), size);
                assert_eq!(rec.loser().len(), size);
                assert!(rec.winner().is_disjoint(rec.loser()));
            }
            assert_eq!(
                s,
                simulate_recourse_survey(&beta, size, 200, LabelMode::Bernoulli, 4).unwrap()
            );
        }
        assert!(simulate_recourse_survey(&beta, 11, 10, LabelMode::Bernoulli, 1).is_err());
        assert!(simulate_recourse_survey(&beta, 0, 10, LabelMode::Bernoulli, 1).is_err());
    }

    #[test]
    fn deterministic_ties_go_to_first_recourse() {
        let beta = StrengthVector::zeros(Arc::new(FeatureCatalog::numbered(8).unwrap()));
        let survey = simulate_recourse_survey(&beta, 3, 100, LabelMode::Deterministic, 12).unwrap();
        // deterministic labels consume no randomness, so replaying the
        // sampler recovers each first-drawn recourse
        assert_eq!(survey.len(), 100);
        let mut rng = rng_from_seed(12);
        let mut scratch = Vec::new();
        for rec in &survey {
            let (a, _) = sample_disjoint(&mut rng, &mut scratch, 8, 3);
            assert_eq!(rec.winner(), &Recourse::from_indices(a, 8).unwrap());
        }
    }

    #[test]
    fn deterministic_mode_picks_easier_recourse() {
        let beta = draw_true_strengths(12, 8).unwrap();
        let survey = simulate_recourse_survey(&beta, 2, 300, LabelMode::Deterministic, 1).unwrap();
        for rec in &survey {
            assert!(recourse_prob(rec.winner(), rec.loser(), &beta).unwrap() >= 0.5);
        }
    }

    #[test]
    fn centered_mse_examples() {
        let cat = Arc::new(FeatureCatalog::numbered(2).unwrap());
        let truth = StrengthVector::new(cat.clone(), vec![0.0, 1.0]).unwrap();
        let est = StrengthVector::new(cat, vec![0.5, 0.7]).unwrap();
        assert!((centered_mse(&est, &truth).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(centered_mse(&truth, &truth).unwrap(), 0.0);
        assert!(centered_mse(&truth.shifted(3.5), &truth).unwrap() < 1e-30);

        let other = draw_true_strengths(3, 0).unwrap();
        assert!(matches!(
            centered_mse(&other, &truth),
            Err(Error::CatalogMismatch(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = PairwiseSimConfig {
            num_features: 5,
            comparisons_schedule: vec![10, 20],
            trials: 1,
            seed: 0,
            estimator: EstimatorConfig::default(),
        };
        assert!(cfg.validate().is_ok());
        cfg.comparisons_schedule = vec![20, 20];
        assert!(run_pairwise_experiment(&cfg).is_err());
        cfg.comparisons_schedule = vec![0, 20];
        assert!(cfg.validate().is_err());
        cfg.comparisons_schedule = vec![10];
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.num_features = 1;
        assert!(cfg.validate().is_err());

        let rc = RecourseSimConfig::new(11, vec![10], 1, 0);
        assert!(run_recourse_experiment(&rc).is_err());
    }

    #[test]
    fn experiment_shape_and_determinism() {
        let cfg = PairwiseSimConfig {
            num_features: 5,
            comparisons_schedule: vec![50, 100, 250],
            trials: 3,
            seed: 99,
            estimator: EstimatorConfig::default(),
        };
        let a = run_pairwise_experiment(&cfg).unwrap();
        let b = run_pairwise_experiment(&cfg).unwrap();
        assert_eq!(a.rows.len(), 9);
        let mses = |r: &ExperimentReport| r.rows.iter().map(|x| x.mse).collect::<Vec<_>>();
        assert_eq!(mses(&a), mses(&b));
        assert_eq!(a.rows[4].trial, 1);
        assert_eq!(a.rows[4].total_comparisons, 100);
        assert_eq!(a.rows[4].comparisons_per_feature, 20.0);
        assert!(a.rows.iter().all(|r| r.mse >= 0.0 && r.runtime_ms >= 0.0));
    }
}
