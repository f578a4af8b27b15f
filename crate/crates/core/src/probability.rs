//! Bradley-Terry win probabilities for single features and for recourses.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::types::{Recourse, StrengthVector};

/// `1 / (1 + e^{-x})` without overflow for any finite `x`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln logistic(x)`, accurate in both tails.
#[inline]
pub fn log_logistic(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Probability that a feature with strength `beta_f` is easier to modify than
/// one with strength `beta_g`: `e^{β_f} / (e^{β_f} + e^{β_g})`.
pub fn pairwise_prob(beta_f: f64, beta_g: f64) -> Result<f64> {
    if !(beta_f.is_finite() && beta_g.is_finite()) {
        return Err(Error::invalid(format!(
            "strengths must be finite, got ({beta_f}, {beta_g})"
        )));
    }
    Ok(logistic(beta_f - beta_g))
}

/// The non-shared parts of two recourses, `(R1∖R2, R2∖R1)`.
///
/// Fails when either side is empty: one recourse contains the other, and
/// there is no cross pair to compare.
pub fn difference_sets(r1: &Recourse, r2: &Recourse) -> Result<(Vec<usize>, Vec<usize>)> {
    let d1 = r1.difference(r2);
    let d2 = r2.difference(r1);
    if d1.is_empty() || d2.is_empty() {
        let why = if r1 == r2 {
            "the recourses are identical"
        } else {
            "one recourse is a subset of the other"
        };
        return Err(Error::NotComparable(why.to_owned()));
    }
    Ok((d1, d2))
}

fn check_bounds(r: &Recourse, beta: &StrengthVector) -> Result<()> {
    match r.members().last() {
        Some(&last) if last >= beta.len() => Err(Error::CatalogMismatch(format!(
            "recourse references feature {last}, strengths cover {}",
            beta.len()
        ))),
        _ => Ok(()),
    }
}

/// Probability that `r1` is easier to implement than `r2`.
///
/// The mean of `pairwise_prob(β_f, β_g)` over `f ∈ R1∖R2`, `g ∈ R2∖R1`.
/// Shared features appear on both sides and cancel, so with `k` shared
/// features the mean runs over `(m−k)(n−k)` cross pairs.
pub fn recourse_prob(r1: &Recourse, r2: &Recourse, beta: &StrengthVector) -> Result<f64> {
    check_bounds(r1, beta)?;
    check_bounds(r2, beta)?;
    let (d1, d2) = difference_sets(r1, r2)?;
    let b = beta.values();
    let mut sum = 0.0;
    for &f in &d1 {
        for &g in &d2 {
            sum += logistic(b[f] - b[g]);
        }
    }
    Ok(sum / (d1.len() * d2.len()) as f64)
}

/// Monte Carlo estimate of [`recourse_prob`] from `samples` uniformly drawn
/// cross pairs. Deterministic in `seed`.
pub fn recourse_prob_mc(
    r1: &Recourse,
    r2: &Recourse,
    beta: &StrengthVector,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    check_bounds(r1, beta)?;
    check_bounds(r2, beta)?;
    let (d1, d2) = difference_sets(r1, r2)?;
    let b = beta.values();
    let mut rng = rng_from_seed(seed);
    let mut sum = 0.0;
    for _ in 0..samples {
        let f = d1[rng.gen_range(0..d1.len())];
        let g = d2[rng.gen_range(0..d2.len())];
        sum += logistic(b[f] - b[g]);
    }
    Ok(sum / samples as f64)
}
