//! Learned predictors. Every hypothesis is a [`SetFunction`] and serializes to
//! a tagged JSON object.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::subsets::SubsetIndex;
use crate::valuation::{MetaUnitDemand, SetFunction, UnitDemand};

/// Largest number of expanded features.
pub const FEATURE_LIMIT: usize = 1_000_000;

/// How a set is turned into a feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Featurizer {
    /// The indicator vector of the set.
    Raw { n: usize },
    /// One coordinate per nonempty subset `T` of at most `degree` items, equal
    /// to 1 iff `T` is contained in the set.
    Subsets { n: usize, degree: usize },
}

/// A [`Featurizer`] with its subset index built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Featurizer", try_from = "Featurizer")]
pub struct FeatureMap {
    n: usize,
    index: Option<SubsetIndex>,
}

impl From<FeatureMap> for Featurizer {
    fn from(f: FeatureMap) -> Featurizer {
        f.featurizer()
    }
}

impl TryFrom<Featurizer> for FeatureMap {
    type Error = Error;
    fn try_from(f: Featurizer) -> Result<FeatureMap> {
        FeatureMap::new(f)
    }
}

impl FeatureMap {
    pub fn new(f: Featurizer) -> Result<FeatureMap> {
        match f {
            Featurizer::Raw { n } => Ok(FeatureMap { n, index: None }),
            Featurizer::Subsets { n, degree } => {
                if degree == 0 {
                    return Err(Error::field("degree", "must be at least 1"));
                }
                Ok(FeatureMap {
                    n,
                    index: Some(SubsetIndex::new(n, 1, degree, FEATURE_LIMIT)?),
                })
            }
        }
    }

    pub fn raw(n: usize) -> FeatureMap {
        FeatureMap { n, index: None }
    }

    pub fn featurizer(&self) -> Featurizer {
        match &self.index {
            None => Featurizer::Raw { n: self.n },
            Some(ix) => Featurizer::Subsets {
                n: self.n,
                degree: ix.max_size(),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.index.as_ref().map_or(self.n, |ix| ix.len())
    }

    /// Indices of the coordinates equal to 1 for `s`.
    pub fn active(&self, s: &ItemSet) -> Vec<usize> {
        match &self.index {
            None => s.to_vec(),
            Some(ix) => ix.subsets_of(s),
        }
    }

    pub fn expand(&self, s: &ItemSet) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for j in self.active(s) {
            x[j] = 1.0;
        }
        x
    }

    pub fn dot(&self, w: &[f64], s: &ItemSet) -> f64 {
        self.active(s)
            .into_iter()
            .map(|j| w[j])
            .fold(0.0, |a, b| a + b)
    }

    /// Coordinates whose feature involves an item of `u0`.
    pub fn touching(&self, u0: &ItemSet) -> Vec<usize> {
        match &self.index {
            None => u0.to_vec(),
            Some(ix) => {
                let mut out = Vec::new();
                ix.for_each(|j, members| {
                    if members.iter().any(|&i| u0.contains(i)) {
                        out.push(j);
                    }
                });
                out
            }
        }
    }
}

/// Indicator of `s` over all nonempty subsets of at most `degree` items, in
/// [`SubsetIndex`] order.
pub fn expand_features(s: &ItemSet, degree: usize) -> Result<Vec<f64>> {
    Ok(FeatureMap::new(Featurizer::Subsets { n: s.n(), degree })?.expand(s))
}

/// `deflation * (w . phi(S) / (scale * z))^(1/p)`, and 0 on subsets of `u0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootedLinearHypothesis {
    pub features: FeatureMap,
    pub w: Vec<f64>,
    pub z: f64,
    pub p: f64,
    /// `R + eps` for sample learners, the approximability factor for prices.
    pub scale: f64,
    pub deflation: f64,
    pub u0: ItemSet,
}

impl RootedLinearHypothesis {
    /// `w . phi(S) / z`, the value before scaling and the root.
    pub fn raw_score(&self, s: &ItemSet) -> f64 {
        self.features.dot(&self.w, s) / self.z
    }
}

impl SetFunction for RootedLinearHypothesis {
    fn ground_size(&self) -> usize {
        self.features.n()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        if s.is_subset(&self.u0) {
            return 0.0;
        }
        let inner = (self.raw_score(s) / self.scale).max(0.0);
        self.deflation * inner.powf(1.0 / self.p)
    }
}

/// `max_{i in S} item_values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemMaxHypothesis {
    pub item_values: Vec<f64>,
}

impl SetFunction for ItemMaxHypothesis {
    fn ground_size(&self) -> usize {
        self.item_values.len()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        s.iter().map(|i| self.item_values[i]).fold(0.0, f64::max)
    }
}

/// `factor * sum_{i in S} item_values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledItemSumHypothesis {
    pub item_values: Vec<f64>,
    pub factor: f64,
}

impl SetFunction for ScaledItemSumHypothesis {
    fn ground_size(&self) -> usize {
        self.item_values.len()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.factor
            * s.iter()
                .map(|i| self.item_values[i])
                .fold(0.0, |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MetaJson {
    n: usize,
    max_size: usize,
    weights: Vec<f64>,
}

/// Unit-demand over meta-items, one per nonempty subset of at most
/// `max_size` items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MetaJson", try_from = "MetaJson")]
pub struct MetaHypothesis(pub MetaUnitDemand);

impl From<MetaHypothesis> for MetaJson {
    fn from(h: MetaHypothesis) -> MetaJson {
        MetaJson {
            n: h.0.index.n(),
            max_size: h.0.index.max_size(),
            weights: h.0.unit_demand.weights().to_vec(),
        }
    }
}

impl TryFrom<MetaJson> for MetaHypothesis {
    type Error = Error;
    fn try_from(j: MetaJson) -> Result<MetaHypothesis> {
        let index = SubsetIndex::new(j.n, 1, j.max_size, FEATURE_LIMIT)?;
        Ok(MetaHypothesis(MetaUnitDemand::new(
            index,
            UnitDemand::new(j.weights)?,
        )?))
    }
}

impl SetFunction for MetaHypothesis {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.0.value_of(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hypothesis {
    RootedLinear(RootedLinearHypothesis),
    UnitDemand(ItemMaxHypothesis),
    MetaUnitDemand(MetaHypothesis),
    ScaledItemSum(ScaledItemSumHypothesis),
    ItemMax(ItemMaxHypothesis),
}

impl Hypothesis {
    fn inner(&self) -> &dyn SetFunction {
        match self {
            Hypothesis::RootedLinear(h) => h,
            Hypothesis::UnitDemand(h) | Hypothesis::ItemMax(h) => h,
            Hypothesis::MetaUnitDemand(h) => h,
            Hypothesis::ScaledItemSum(h) => h,
        }
    }

    pub fn from_json(text: &str) -> Result<Hypothesis> {
        serde_json::from_str(text).map_err(|e| Error::field("hypothesis", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypotheses always serialize")
    }
}

impl SetFunction for Hypothesis {
    fn ground_size(&self) -> usize {
        self.inner().ground_size()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.inner().value_of(s)
    }
}

macro_rules! impl_from {
    ($($t:ty => $v:ident),*) => {
        $(impl From<$t> for Hypothesis {
            fn from(h: $t) -> Self { Hypothesis::$v(h) }
        })*
    };
}

impl_from!(RootedLinearHypothesis => RootedLinear, MetaHypothesis => MetaUnitDemand,
    ScaledItemSumHypothesis => ScaledItemSum);

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, items: &[usize]) -> ItemSet {
        ItemSet::from_indices(n, items.iter().copied()).unwrap()
    }

    #[test]
    fn expansion_examples() {
        let fm = FeatureMap::new(Featurizer::Subsets { n: 3, degree: 2 }).unwrap();
        let ix = SubsetIndex::new(3, 1, 2, 100).unwrap();
        let x = expand_features(&set(3, &[0, 2]), 2).unwrap();
        let ones: Vec<usize> = (0..x.len()).filter(|&j| x[j] == 1.0).collect();
        let mut want = vec![
            ix.index_of(&[0]).unwrap(),
            ix.index_of(&[2]).unwrap(),
            ix.index_of(&[0, 2]).unwrap(),
        ];
        want.sort();
        assert_eq!(ones, want);
        assert_eq!(fm.dim(), 6);
        assert!(expand_features(&ItemSet::empty(3), 2)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let s = set(4, &[1, 3]);
        assert_eq!(expand_features(&s, 1).unwrap(), s.indicator());
    }

    #[test]
    fn expansion_guard() {
        assert!(matches!(
            expand_features(&ItemSet::empty(200), 3),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn touching_masks_any_overlap() {
        let fm = FeatureMap::new(Featurizer::Subsets { n: 3, degree: 2 }).unwrap();
        // features {0}, {0,1}, {0,2}
        assert_eq!(fm.touching(&set(3, &[0])).len(), 3);
        assert_eq!(FeatureMap::raw(3).touching(&set(3, &[0, 2])), vec![0, 2]);
    }

    #[test]
    fn rooted_linear_prediction() {
        let h = RootedLinearHypothesis {
            features: FeatureMap::raw(3),
            w: vec![4.0, 0.0, 12.0],
            z: 2.0,
            p: 2.0,
            scale: 2.0,
            deflation: 1.0,
            u0: set(3, &[1]),
        };
        assert_eq!(h.value_of(&set(3, &[0])), 1.0);
        assert_eq!(h.value_of(&set(3, &[0, 2])), 2.0);
        assert_eq!(h.value_of(&set(3, &[1])), 0.0);
        let json = Hypothesis::from(h.clone()).to_json();
        assert_eq!(
            Hypothesis::from_json(&json).unwrap(),
            Hypothesis::RootedLinear(h)
        );
    }

    #[test]
    fn item_hypotheses_roundtrip() {
        let hs = [
            Hypothesis::UnitDemand(ItemMaxHypothesis {
                item_values: vec![5.0, 3.0],
            }),
            Hypothesis::ScaledItemSum(ScaledItemSumHypothesis {
                item_values: vec![1.0, 3.0],
                factor: 0.5,
            }),
        ];
        assert_eq!(hs[0].value_of(&ItemSet::full(2)), 5.0);
        assert_eq!(hs[1].value_of(&ItemSet::full(2)), 2.0);
        for h in hs {
            assert_eq!(Hypothesis::from_json(&h.to_json()).unwrap(), h);
        }
    }
}
