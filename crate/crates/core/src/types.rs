//! Feature catalogs, strength and cost vectors, and recourses.
//!
//! Strengths are Bradley-Terry log-strengths: feature `f` is easier to modify
//! than `g` with probability `logistic(β_f − β_g)`. They are only defined up
//! to an additive constant. Costs are their additive inverse.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Separators reserved by the on-disk formats.
pub const RESERVED_SEPARATORS: [char; 2] = [',', ';'];

/// Ordered, duplicate-free set of named features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCatalog {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl FeatureCatalog {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(Error::invalid(format!(
                "a catalog needs at least 2 features, got {}",
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            validate_feature_name(name)?;
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate feature `{name}`")));
            }
        }
        Ok(FeatureCatalog { names, index })
    }

    /// Catalog `f0, f1, …, f{n-1}` used by the simulators.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("f{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false for a constructed catalog; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::invalid(format!("unknown feature `{name}`")))
    }

    /// Builds a recourse from feature names.
    pub fn recourse<S: AsRef<str>>(&self, names: &[S]) -> Result<Recourse> {
        let mut members = Vec::with_capacity(names.len());
        for name in names {
            let idx = self.position(name.as_ref())?;
            if members.contains(&idx) {
                return Err(Error::invalid(format!(
                    "feature `{}` listed twice in recourse",
                    name.as_ref()
                )));
            }
            members.push(idx);
        }
        Recourse::from_indices(members, self.len())
    }
}

fn validate_feature_name(name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::invalid("feature names must be non-empty"));
    }
    if name.contains(RESERVED_SEPARATORS) {
        return Err(Error::invalid(format!(
            "feature `{name}` contains a reserved separator (`,` or `;`)"
        )));
    }
    Ok(())
}

/// One finite log-strength per catalog feature.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthVector {
    catalog: Arc<FeatureCatalog>,
    values: Vec<f64>,
}

impl StrengthVector {
    pub fn new(catalog: Arc<FeatureCatalog>, values: Vec<f64>) -> Result<Self> {
        check_values(&catalog, &values, "strength")?;
        Ok(StrengthVector { catalog, values })
    }

    pub fn zeros(catalog: Arc<FeatureCatalog>) -> Self {
        let values = vec![0.0; catalog.len()];
        StrengthVector { catalog, values }
    }

    pub fn catalog(&self) -> &Arc<FeatureCatalog> {
        &self.catalog
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.catalog.index_of(name).map(|i| self.values[i])
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Same vector in the zero-mean gauge.
    pub fn centered(&self) -> Self {
        self.shifted(-self.mean())
    }

    /// Adds `c` to every entry. Probabilities are unchanged.
    pub fn shifted(&self, c: f64) -> Self {
        StrengthVector {
            catalog: Arc::clone(&self.catalog),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn to_costs(&self) -> CostVector {
        costs_from_strengths(self)
    }
}

/// Per-feature modification cost, `cost_f = −β_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    catalog: Arc<FeatureCatalog>,
    values: Vec<f64>,
}

impl CostVector {
    pub fn new(catalog: Arc<FeatureCatalog>, values: Vec<f64>) -> Result<Self> {
        check_values(&catalog, &values, "cost")?;
        Ok(CostVector { catalog, values })
    }

    pub fn catalog(&self) -> &Arc<FeatureCatalog> {
        &self.catalog
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.catalog.index_of(name).map(|i| self.values[i])
    }

    pub fn to_strengths(&self) -> StrengthVector {
        strengths_from_costs(self)
    }
}

fn check_values(catalog: &FeatureCatalog, values: &[f64], what: &str) -> Result<()> {
    if values.len() != catalog.len() {
        return Err(Error::CatalogMismatch(format!(
            "{} {what} values for a catalog of {} features",
            values.len(),
            catalog.len()
        )));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "{what} for `{}` is not finite ({v})",
            catalog.name(i)
        )));
    }
    Ok(())
}

pub fn costs_from_strengths(beta: &StrengthVector) -> CostVector {
    CostVector {
        catalog: Arc::clone(&beta.catalog),
        values: beta.values.iter().map(|b| -b).collect(),
    }
}

pub fn strengths_from_costs(costs: &CostVector) -> StrengthVector {
    StrengthVector {
        catalog: Arc::clone(&costs.catalog),
        values: costs.values.iter().map(|c| -c).collect(),
    }
}

/// Non-empty set of modified features, stored as sorted catalog indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Recourse {
    members: Vec<usize>,
}

impl Recourse {
    /// `catalog_len` bounds the indices; duplicates are rejected.
    pub fn from_indices<I: IntoIterator<Item = usize>>(
        indices: I,
        catalog_len: usize,
    ) -> Result<Self> {
        let mut members: Vec<usize> = indices.into_iter().collect();
        if members.is_empty() {
            return Err(Error::invalid(
                "a recourse must modify at least one feature",
            ));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate feature in recourse"));
        }
        if let Some(&last) = members.last() {
            if last >= catalog_len {
                return Err(Error::invalid(format!(
                    "feature index {last} outside catalog of {catalog_len}"
                )));
            }
        }
        Ok(Recourse { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    /// Members of `self` that are not in `other`, in ascending order.
    pub fn difference(&self, other: &Recourse) -> Vec<usize> {
        self.members
            .iter()
            .copied()
            .filter(|&f| !other.contains(f))
            .collect()
    }

    pub fn shared_with(&self, other: &Recourse) -> usize {
        self.members.iter().filter(|&&f| other.contains(f)).count()
    }

    pub fn is_disjoint(&self, other: &Recourse) -> bool {
        self.shared_with(other) == 0
    }

    /// `;`-joined feature names.
    pub fn label(&self, catalog: &FeatureCatalog) -> String {
        RecourseLabel {
            recourse: self,
            catalog,
        }
        .to_string()
    }
}

struct RecourseLabel<'a> {
    recourse: &'a Recourse,
    catalog: &'a FeatureCatalog,
}

impl fmt::Display for RecourseLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &idx) in self.recourse.members.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(self.catalog.name(idx))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Arc<FeatureCatalog> {
        Arc::new(FeatureCatalog::new(["amt", "add", "inc", "age"]).unwrap())
    }

    #[test]
    fn catalog_rejects_bad_names() {
        assert!(FeatureCatalog::new(["a"]).is_err());
        assert!(FeatureCatalog::new(["a", "a"]).is_err());
        assert!(FeatureCatalog::new(["a", ""]).is_err());
        assert!(FeatureCatalog::new(["a", "b,c"]).is_err());
        assert!(FeatureCatalog::new(["a", "b;c"]).is_err());
        let c = FeatureCatalog::numbered(3).unwrap();
        assert_eq!(c.names(), ["f0", "f1", "f2"]);
        assert_eq!(c.index_of("f2"), Some(2));
    }

    #[test]
    fn strength_vector_invariants() {
        let cat = catalog();
        assert!(matches!(
            StrengthVector::new(cat.clone(), vec![0.0; 3]),
            Err(Error::CatalogMismatch(_))
        ));
        assert!(StrengthVector::new(cat.clone(), vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        let b = StrengthVector::new(cat, vec![1.0, 2.0, 3.0, 6.0]).unwrap();
        assert_eq!(b.centered().values(), &[-2.0, -1.0, 0.0, 3.0]);
        assert_eq!(b.get("inc"), Some(3.0));
    }

    #[test]
    fn costs_are_negated_strengths() {
        let cat = catalog();
        let ln = f64::ln;
        let beta = StrengthVector::new(cat.clone(), vec![ln(10.0), ln(3.0), ln(2.0), 0.0]).unwrap();
        let costs = costs_from_strengths(&beta);
        assert_eq!(costs.values(), &[-ln(10.0), -ln(3.0), -ln(2.0), -0.0]);
        assert_eq!(strengths_from_costs(&costs), beta);

        let zeros = StrengthVector::zeros(cat);
        assert!(zeros.to_costs().values().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn recourse_construction() {
        let cat = catalog();
        let r = cat.recourse(&["age", "amt"]).unwrap();
        assert_eq!(r.members(), &[0, 3]);
        assert_eq!(r.label(&cat), "amt;age");
        assert!(cat.recourse::<&str>(&[]).is_err());
        assert!(cat.recourse(&["amt", "amt"]).is_err());
        assert!(cat.recourse(&["nope"]).is_err());
        assert!(Recourse::from_indices([4], 4).is_err());

        let other = cat.recourse(&["age", "inc"]).unwrap();
        assert_eq!(r.difference(&other), vec![0]);
        assert_eq!(r.shared_with(&other), 1);
        assert!(!r.is_disjoint(&other));
    }
}
