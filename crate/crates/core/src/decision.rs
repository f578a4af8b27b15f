//! Choosing between recourses given per-feature costs.

use crate::error::{Error, Result};
use crate::probability::{recourse_prob, recourse_prob_mc};
use crate::types::{CostVector, Recourse};

pub const DEFAULT_TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Easier {
    First,
    Second,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecourseComparisonResult {
    /// Probability that the first recourse is easier.
    pub rho_12: f64,
    pub rho_21: f64,
    pub easier: Easier,
}

/// Compares two recourses under `costs`. With `mc` set, `rho_12` is a Monte
/// Carlo estimate and `rho_21` its complement.
pub fn compare_recourses(
    r1: &Recourse,
    r2: &Recourse,
    costs: &CostVector,
    mc: Option<McSettings>,
) -> Result<RecourseComparisonResult> {
    compare_recourses_with_epsilon(r1, r2, costs, mc, DEFAULT_TIE_EPSILON)
}

pub fn compare_recourses_with_epsilon(
    r1: &Recourse,
    r2: &Recourse,
    costs: &CostVector,
    mc: Option<McSettings>,
    tie_epsilon: f64,
) -> Result<RecourseComparisonResult> {
    if !(tie_epsilon >= 0.0 && tie_epsilon.is_finite()) {
        return Err(Error::invalid(
            "tie epsilon must be finite and non-negative",
        ));
    }
    let beta = costs.to_strengths();
    let (rho_12, rho_21) = match mc {
        None => (recourse_prob(r1, r2, &beta)?, recourse_prob(r2, r1, &beta)?),
        Some(s) => {
            let rho = recourse_prob_mc(r1, r2, &beta, s.samples, s.seed)?;
            (rho, 1.0 - rho)
        }
    };
    let easier = if (rho_12 - 0.5).abs() < tie_epsilon {
        Easier::Tie
    } else if rho_12 > 0.5 {
        Easier::First
    } else {
        Easier::Second
    };
    Ok(RecourseComparisonResult {
        rho_12,
        rho_21,
        easier,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ideal,
    /// Some alternative is strictly easier; the first one found is reported.
    NonIdeal {
        witness: Recourse,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealityReport {
    pub verdict: Verdict,
    /// Positions in `alternatives` that could not be compared with `r`.
    pub skipped: Vec<usize>,
}

impl IdealityReport {
    pub fn is_ideal(&self) -> bool {
        self.verdict == Verdict::Ideal
    }
}

/// `r` is ideal when no alternative `R′` has `ρ(R>R′) < ρ(R′>R)`.
///
/// Alternatives are scanned in order. Ones that are subsets, supersets or
/// copies of `r` are skipped and listed in the report. An empty list is
/// vacuously ideal.
pub fn is_ideal(
    r: &Recourse,
    alternatives: &[Recourse],
    costs: &CostVector,
) -> Result<IdealityReport> {
    let beta = costs.to_strengths();
    let mut skipped = Vec::new();
    for (i, alt) in alternatives.iter().enumerate() {
        let forward = match recourse_prob(r, alt, &beta) {
            Ok(p) => p,
            Err(Error::NotComparable(_)) => {
                skipped.push(i);
                continue;
            }
            Err(e) => return Err(e),
        };
        let backward = recourse_prob(alt, r, &beta)?;
        if forward < backward {
            return Ok(IdealityReport {
                verdict: Verdict::NonIdeal {
                    witness: alt.clone(),
                },
                skipped,
            });
        }
    }
    Ok(IdealityReport {
        verdict: Verdict::Ideal,
        skipped,
    })
}
