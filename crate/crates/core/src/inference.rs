//! MAP estimation of Bradley-Terry strengths by minorization-maximization.
//!
//! The prior is expressed as pseudo-comparisons: every unordered pair of
//! features receives `λ` extra comparisons, split evenly between the two
//! outcomes. With `λ > 0` the objective is strictly concave in the zero-mean
//! gauge and the fixed point is the unique MAP estimate. With `λ = 0` this is
//! plain maximum likelihood, which exists only when the win graph is
//! strongly connected.
//!
//! The update, in log-space, is
//!
//! ```text
//! β_f ← β_f + ln W̃_f − ln Σ_{g≠f} Ñ_fg · logistic(β_f − β_g)
//! ```
//!
//! which is the classical `w_f ← W̃_f / Σ_g Ñ_fg / (w_f + w_g)` with
//! `w = e^β`, without ever exponentiating a strength.

use serde::{Deserialize, Serialize};

use crate::dataset::{ComparisonDataset, PairTallies, PairwiseComparison, RecourseComparison};
use crate::error::{Error, Result};
use crate::probability::{difference_sets, log_logistic, logistic};
use crate::types::{FeatureCatalog, StrengthVector};

use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Pseudo-comparisons added to every unordered feature pair.
    pub pseudo_count: f64,
    /// Stop once the largest per-iteration change in β is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            pseudo_count: 0.1,
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pseudo_count.is_finite() && self.pseudo_count >= 0.0) {
            return Err(Error::invalid(format!(
                "pseudo-count must be finite and non-negative, got {}",
                self.pseudo_count
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// Zero-mean strengths.
    pub strengths: StrengthVector,
    pub iterations: usize,
    pub converged: bool,
    /// Largest |Δβ| in the last iteration.
    pub final_delta: f64,
    /// Regularized log-likelihood at `strengths`.
    pub log_posterior: f64,
}

/// Regularized win/comparison counts: `W̃_fg = W_fg + λ/2`.
struct Augmented {
    n: usize,
    wins: Vec<f64>,
}

impl Augmented {
    fn new(tallies: &PairTallies, lambda: f64) -> Self {
        let n = tallies.num_features();
        let half = lambda / 2.0;
        let mut wins = vec![0.0; n * n];
        for f in 0..n {
            for g in 0..n {
                if f != g {
                    wins[f * n + g] = tallies.wins(f, g) + half;
                }
            }
        }
        Augmented { n, wins }
    }

    #[inline]
    fn wins(&self, f: usize, g: usize) -> f64 {
        self.wins[f * self.n + g]
    }

    #[inline]
    fn compared(&self, f: usize, g: usize) -> f64 {
        self.wins(f, g) + self.wins(g, f)
    }

    fn log_posterior(&self, beta: &[f64]) -> f64 {
        let mut lp = 0.0;
        for f in 0..self.n {
            for g in 0..self.n {
                let w = self.wins(f, g);
                if f != g && w > 0.0 {
                    lp += w * log_logistic(beta[f] - beta[g]);
                }
            }
        }
        lp
    }
}

/// Fits zero-mean strengths to `dataset`.
///
/// Running out of iterations is not an error: the last iterate is returned
/// with `converged = false`.
pub fn map_estimate(
    dataset: &ComparisonDataset,
    config: &EstimatorConfig,
) -> Result<EstimateResult> {
    config.validate()?;
    let catalog = Arc::clone(dataset.catalog());
    let n = catalog.len();
    let tallies = dataset.tallies();
    if config.pseudo_count == 0.0 && !strongly_connected(&tallies) {
        return Err(Error::NonIdentifiable);
    }
    let aug = Augmented::new(&tallies, config.pseudo_count);
    let log_total_wins: Vec<f64> = (0..n)
        .map(|f| (0..n).map(|g| aug.wins(f, g)).sum::<f64>().ln())
        .collect();

    let mut beta = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_lp = if cfg!(debug_assertions) {
        aug.log_posterior(&beta)
    } else {
        f64::NEG_INFINITY
    };

    while iterations < config.max_iterations {
        iterations += 1;
        for f in 0..n {
            let mut expected = 0.0;
            for g in 0..n {
                if g != f {
                    let c = aug.compared(f, g);
                    if c > 0.0 {
                        expected += c * logistic(beta[f] - beta[g]);
                    }
                }
            }
            next[f] = beta[f] + log_total_wins[f] - expected.ln();
        }
        let mean = next.iter().sum::<f64>() / n as f64;
        delta = 0.0;
        for (b, nb) in beta.iter_mut().zip(next.iter()) {
            let centered = nb - mean;
            delta = f64::max(delta, (centered - *b).abs());
            *b = centered;
        }
        if cfg!(debug_assertions) {
            let lp = aug.log_posterior(&beta);
            debug_assert!(
                lp >= last_lp - 1e-9 * (1.0 + last_lp.abs()),
                "MM step decreased the objective: {last_lp} -> {lp}"
            );
            last_lp = lp;
        }
        if delta <= config.tolerance {
            converged = true;
            break;
        }
    }

    let log_posterior = aug.log_posterior(&beta);
    Ok(EstimateResult {
        strengths: StrengthVector::new(catalog, beta)?,
        iterations,
        converged,
        final_delta: delta,
        log_posterior,
    })
}

/// Every feature can reach every other along "beat" edges.
fn strongly_connected(tallies: &PairTallies) -> bool {
    let n = tallies.num_features();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for (g, visited) in seen.iter_mut().enumerate() {
                let w = if forward {
                    tallies.wins(f, g)
                } else {
                    tallies.wins(g, f)
                };
                if !*visited && w > 0.0 {
                    *visited = true;
                    stack.push(g);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Pairwise dataset produced from recourse-level records.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub dataset: ComparisonDataset,
    /// Records dropped because one recourse contained the other.
    pub skipped: usize,
}

/// Expands each `R1 > R2` into `f > g` for every `f ∈ R1∖R2`, `g ∈ R2∖R1`,
/// each weighted `1 / (|R1|·|R2|)` using the full recourse sizes.
pub fn expand_recourse_comparisons(
    records: &[RecourseComparison],
    catalog: Arc<FeatureCatalog>,
) -> Result<Expansion> {
    let n = catalog.len();
    let mut dataset = ComparisonDataset::new(catalog);
    let mut skipped = 0;
    for rec in records {
        let (winner, loser) = (rec.winner(), rec.loser());
        for r in [winner, loser] {
            if r.members().iter().any(|&f| f >= n) {
                return Err(Error::CatalogMismatch(format!(
                    "recourse references a feature outside catalog of {n}"
                )));
            }
        }
        let (wins, losses) = match difference_sets(winner, loser) {
            Ok(d) => d,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let weight = 1.0 / (winner.len() * loser.len()) as f64;
        for &f in &wins {
            for &g in &losses {
                dataset.push(PairwiseComparison::new(f, g, weight)?)?;
            }
        }
    }
    Ok(Expansion { dataset, skipped })
}
