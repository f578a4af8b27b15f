//! Survey records and the weighted win tallies derived from them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::types::{FeatureCatalog, Recourse};

/// "`winner` is easier to modify than `loser`", counted `weight` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseComparison {
    winner: usize,
    loser: usize,
    weight: f64,
}

impl PairwiseComparison {
    pub fn new(winner: usize, loser: usize, weight: f64) -> Result<Self> {
        if winner == loser {
            return Err(Error::invalid("a feature cannot be compared with itself"));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::invalid(format!(
                "comparison weight must be positive and finite, got {weight}"
            )));
        }
        Ok(PairwiseComparison {
            winner,
            loser,
            weight,
        })
    }

    pub fn winner(&self) -> usize {
        self.winner
    }

    pub fn loser(&self) -> usize {
        self.loser
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// "Recourse `winner` is easier to implement than recourse `loser`".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecourseComparison {
    winner: Recourse,
    loser: Recourse,
}

impl RecourseComparison {
    pub fn new(winner: Recourse, loser: Recourse) -> Result<Self> {
        if winner == loser {
            return Err(Error::invalid(
                "winner and loser of a recourse comparison must differ",
            ));
        }
        Ok(RecourseComparison { winner, loser })
    }

    pub fn winner(&self) -> &Recourse {
        &self.winner
    }

    pub fn loser(&self) -> &Recourse {
        &self.loser
    }
}

/// Weighted pairwise survey over a fixed catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonDataset {
    catalog: Arc<FeatureCatalog>,
    records: Vec<PairwiseComparison>,
}

impl ComparisonDataset {
    pub fn new(catalog: Arc<FeatureCatalog>) -> Self {
        ComparisonDataset {
            catalog,
            records: Vec::new(),
        }
    }

    pub fn with_records(
        catalog: Arc<FeatureCatalog>,
        records: impl IntoIterator<Item = PairwiseComparison>,
    ) -> Result<Self> {
        let mut ds = Self::new(catalog);
        for r in records {
            ds.push(r)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, record: PairwiseComparison) -> Result<()> {
        let n = self.catalog.len();
        if record.winner >= n || record.loser >= n {
            return Err(Error::invalid(format!(
                "comparison references feature outside catalog of {n}"
            )));
        }
        self.records.push(record);
        Ok(())
    }

    /// Appends a record by feature names.
    pub fn push_named(&mut self, winner: &str, loser: &str, weight: f64) -> Result<()> {
        let w = self.catalog.position(winner)?;
        let l = self.catalog.position(loser)?;
        self.push(PairwiseComparison::new(w, l, weight)?)
    }

    pub fn catalog(&self) -> &Arc<FeatureCatalog> {
        &self.catalog
    }

    pub fn records(&self) -> &[PairwiseComparison] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sums record weights into a dense win matrix. Recomputed on every call.
    pub fn tallies(&self) -> PairTallies {
        let n = self.catalog.len();
        let mut wins = vec![0.0; n * n];
        for r in &self.records {
            wins[r.winner * n + r.loser] += r.weight;
        }
        PairTallies { n, wins }
    }
}

/// Dense `W_fg`: total weight of records where `f` beat `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTallies {
    n: usize,
    wins: Vec<f64>,
}

impl PairTallies {
    pub fn num_features(&self) -> usize {
        self.n
    }

    pub fn wins(&self, f: usize, g: usize) -> f64 {
        self.wins[f * self.n + g]
    }

    /// `N_fg = W_fg + W_gf`, symmetric in its arguments.
    pub fn compared(&self, f: usize, g: usize) -> f64 {
        self.wins(f, g) + self.wins(g, f)
    }

    /// Total weight won by `f` against anyone.
    pub fn total_wins(&self, f: usize) -> f64 {
        self.wins[f * self.n..(f + 1) * self.n].iter().sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.wins.iter().sum()
    }
}

/// Relative frequency `W_fg / N_fg` with which `f` beat `g`.
pub fn empirical_pair_prob(dataset: &ComparisonDataset, f: &str, g: &str) -> Result<f64> {
    let fi = dataset.catalog.position(f)?;
    let gi = dataset.catalog.position(g)?;
    if fi == gi {
        return Err(Error::invalid(
            "empirical probability needs two distinct features",
        ));
    }
    let tallies = dataset.tallies();
    let total = tallies.compared(fi, gi);
    if total <= 0.0 {
        return Err(Error::NoData(f.to_owned(), g.to_owned()));
    }
    Ok(tallies.wins(fi, gi) / total)
}
