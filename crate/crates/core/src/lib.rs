//! Inferring per-feature "ease-of-modification" costs from comparison surveys.
//!
//! Features carry Bradley-Terry log-strengths `β`; a feature's cost is `−β`.
//! Strengths are fitted by regularized minorization-maximization from
//! pairwise records, or from recourse-level records ("this set of changes is
//! easier than that one") expanded into weighted pairwise records.
//!
//! ```
//! use std::sync::Arc;
//! use recourse_cost::{compare_recourses, CostVector, Easier, FeatureCatalog};
//!
//! let catalog = Arc::new(FeatureCatalog::new(["amt", "add", "inc", "age"]).unwrap());
//! let ln = f64::ln;
//! let costs = CostVector::new(catalog.clone(), vec![-ln(10.0), -ln(3.0), -ln(2.0), 0.0]).unwrap();
//! let a = catalog.recourse(&["amt", "age"]).unwrap();
//! let b = catalog.recourse(&["add", "inc"]).unwrap();
//! let res = compare_recourses(&a, &b, &costs, None).unwrap();
//! assert_eq!(res.easier, Easier::First);
//! ```

pub mod dataset;
pub mod decision;
pub mod error;
pub mod inference;
pub mod probability;
pub mod rng;
pub mod simulation;
pub mod types;

pub use dataset::{
    empirical_pair_prob, ComparisonDataset, PairTallies, PairwiseComparison, RecourseComparison,
};
pub use decision::{
    compare_recourses, compare_recourses_with_epsilon, is_ideal, Easier, IdealityReport,
    McSettings, RecourseComparisonResult, Verdict, DEFAULT_TIE_EPSILON,
};
pub use error::{Error, Result};
pub use inference::{
    expand_recourse_comparisons, map_estimate, EstimateResult, EstimatorConfig, Expansion,
};
pub use probability::{pairwise_prob, recourse_prob, recourse_prob_mc};
pub use simulation::{
    centered_mse, draw_true_strengths, run_pairwise_experiment, run_recourse_experiment,
    simulate_pairwise_survey, simulate_recourse_survey, ExperimentReport, ExperimentRow, LabelMode,
    PairwiseSimConfig, RecourseSimConfig,
};
pub use types::{
    costs_from_strengths, strengths_from_costs, CostVector, FeatureCatalog, Recourse,
    StrengthVector,
};
