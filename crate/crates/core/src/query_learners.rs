//! Learning everywhere from value queries on singletons.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, ItemMaxHypothesis, ScaledItemSumHypothesis};
use crate::itemset::{all_subsets, ItemSet};
use crate::valuation::SetFunction;

/// Answers exact value queries and counts them.
pub struct ValueOracle<'a> {
    target: &'a (dyn SetFunction + Sync),
    queries: AtomicUsize,
}

impl<'a> ValueOracle<'a> {
    pub fn new(target: &'a (dyn SetFunction + Sync)) -> Self {
        ValueOracle {
            target,
            queries: AtomicUsize::new(0),
        }
    }

    pub fn n(&self) -> usize {
        self.target.ground_size()
    }

    pub fn value(&self, s: &ItemSet) -> Result<f64> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.target.eval(s)
    }

    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Restricted classes with an item-based factor-`R` hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    /// OXS with at most `R` MAX trees.
    OxsRTrees,
    /// OXS whose MAX trees have at most `R` leaves.
    OxsRLeaves,
    /// XOS with at most `R` SUM trees.
    XosRTrees,
    /// XOS whose SUM trees have at most `R` leaves.
    XosRLeaves,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [
        ClassTag::OxsRTrees,
        ClassTag::OxsRLeaves,
        ClassTag::XosRTrees,
        ClassTag::XosRLeaves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::OxsRTrees => "oxs-r-trees",
            ClassTag::OxsRLeaves => "oxs-r-leaves",
            ClassTag::XosRTrees => "xos-r-trees",
            ClassTag::XosRLeaves => "xos-r-leaves",
        }
    }

    /// True when the hypothesis is `(1/R) sum f(i)`; false for `max f(i)`.
    pub fn uses_sum(self) -> bool {
        matches!(self, ClassTag::OxsRLeaves | ClassTag::XosRTrees)
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<ClassTag> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "class tag",
                name: s.to_string(),
            })
    }
}

/// Item-based hypothesis from per-item values.
///
/// Sum form: `f*(S) <= sum f*(i)` by subadditivity, and `sum f*(i) <= R f*(S)`
/// when every item's best leaf sits in one of at most `R` SUM trees, or every
/// MAX tree has at most `R` leaves. Max form: `max f*(i) <= f*(S)` by
/// monotonicity, and `f*(S) <= R max f*(i)` when at most `R` items contribute.
pub fn item_based_hypothesis(tag: ClassTag, item_values: Vec<f64>, r: f64) -> Result<Hypothesis> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::field("R", format!("must be at least 1, got {r}")));
    }
    Ok(if tag.uses_sum() {
        Hypothesis::ScaledItemSum(ScaledItemSumHypothesis {
            item_values,
            factor: 1.0 / r,
        })
    } else {
        Hypothesis::ItemMax(ItemMaxHypothesis { item_values })
    })
}

/// Queries the `n` singletons and returns the class's item-based hypothesis.
pub fn vq_learn_item_based(oracle: &ValueOracle<'_>, tag: ClassTag, r: f64) -> Result<Hypothesis> {
    let n = oracle.n();
    let values = (0..n)
        .map(|i| oracle.value(&ItemSet::from_indices(n, [i])?))
        .collect::<Result<Vec<f64>>>()?;
    item_based_hypothesis(tag, values, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqWitness {
    pub set: ItemSet,
    pub target: f64,
    pub hypothesis: f64,
    /// `f*/h`, 1 when both vanish, infinite on overestimates or `h = 0 < f*`.
    #[serde(with = "crate::ext_f64")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VqCheck {
    Pass { worst: VqWitness },
    Fail { worst: VqWitness },
}

impl VqCheck {
    pub fn passed(&self) -> bool {
        matches!(self, VqCheck::Pass { .. })
    }
    pub fn worst(&self) -> &VqWitness {
        match self {
            VqCheck::Pass { worst } | VqCheck::Fail { worst } => worst,
        }
    }
}

pub const VQ_CHECK_LIMIT: usize = 16;
const TOL: f64 = 1e-9;

/// `f*/h` with the zero conventions; overestimates beyond a relative
/// tolerance count as infinite.
pub fn pmac_ratio(target: f64, hyp: f64) -> f64 {
    let tol = TOL * target.abs().max(1.0);
    if hyp > target + tol {
        f64::INFINITY
    } else if hyp <= 0.0 {
        if target <= tol {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (target / hyp).max(1.0)
    }
}

/// Checks `h(S) <= f*(S) <= R h(S)` on every subset and reports the subset
/// with the largest ratio.
pub fn vq_hypothesis_check(
    oracle: &ValueOracle<'_>,
    hyp: &dyn SetFunction,
    r: f64,
) -> Result<VqCheck> {
    let n = oracle.n();
    if n > VQ_CHECK_LIMIT {
        return Err(Error::guard(
            "checked ground set",
            VQ_CHECK_LIMIT as u128,
            n as u128,
        ));
    }
    if hyp.ground_size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: hyp.ground_size(),
        });
    }
    let mut worst: Option<VqWitness> = None;
    for s in all_subsets(n) {
        let t = oracle.value(&s)?;
        let h = hyp.value_of(&s);
        let ratio = pmac_ratio(t, h);
        if worst.as_ref().is_none_or(|w| ratio > w.ratio) {
            worst = Some(VqWitness {
                set: s,
                target: t,
                hypothesis: h,
                ratio,
            });
        }
    }
    let worst = worst.expect("at least the empty set");
    Ok(if worst.ratio <= r * (1.0 + TOL) {
        VqCheck::Pass { worst }
    } else {
        VqCheck::Fail { worst }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{Oxs, UnitDemand, Xos};

    #[test]
    fn xos_two_trees_example() {
        let target = Xos::from_dense(&[vec![1.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let oracle = ValueOracle::new(&target);
        let h = vq_learn_item_based(&oracle, ClassTag::XosRTrees, 2.0).unwrap();
        assert_eq!(oracle.queries(), 2);
        assert_eq!(h.value_of(&ItemSet::full(2)), 2.0);
        assert!(vq_hypothesis_check(&oracle, &h, 2.0).unwrap().passed());
    }

    #[test]
    fn unit_demand_is_exact() {
        let target = UnitDemand::new(vec![2.0, 7.0, 1.0]).unwrap();
        let oracle = ValueOracle::new(&target);
        let h = vq_learn_item_based(&oracle, ClassTag::OxsRTrees, 1.0).unwrap();
        assert!(all_subsets(3).all(|s| h.value_of(&s) == target.value_of(&s)));
        let check = vq_hypothesis_check(&oracle, &h, 1.0).unwrap();
        assert!(check.passed());
        assert_eq!(check.worst().ratio, 1.0);
    }

    #[test]
    fn oxs_both_tags() {
        let target =
            Oxs::from_dense(&[vec![1.0, 2.0, 0.0, 0.0], vec![0.0, 0.0, 3.0, 1.0]]).unwrap();
        let oracle = ValueOracle::new(&target);
        for tag in [ClassTag::OxsRTrees, ClassTag::OxsRLeaves] {
            let h = vq_learn_item_based(&oracle, tag, 2.0).unwrap();
            assert!(
                vq_hypothesis_check(&oracle, &h, 2.0).unwrap().passed(),
                "{tag:?}"
            );
        }
    }

    #[test]
    fn wrong_factor_yields_witness() {
        let target = Xos::from_dense(&[vec![1.0, 1.0, 1.0]]).unwrap();
        let oracle = ValueOracle::new(&target);
        let h = vq_learn_item_based(&oracle, ClassTag::XosRLeaves, 3.0).unwrap();
        let check = vq_hypothesis_check(&oracle, &h, 2.0).unwrap();
        assert!(!check.passed());
        assert_eq!(check.worst().set, ItemSet::full(3));
        assert!(vq_hypothesis_check(&oracle, &h, 1e9).unwrap().passed());
    }

    #[test]
    fn tags_parse() {
        for t in ClassTag::ALL {
            assert_eq!(t.name().parse::<ClassTag>().unwrap(), t);
            assert_eq!(
                serde_json::to_string(&t).unwrap(),
                format!("\"{}\"", t.name())
            );
        }
        assert!("xos".parse::<ClassTag>().is_err());
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(pmac_ratio(0.0, 0.0), 1.0);
        assert_eq!(pmac_ratio(2.0, 0.0), f64::INFINITY);
        assert_eq!(pmac_ratio(2.0, 3.0), f64::INFINITY);
        assert_eq!(pmac_ratio(4.0, 2.0), 2.0);
    }
}
