//! Learners from labeled samples `(S, f*(S))`.
//!
//! The rooted-linear learners reduce to a consistent linear separator: a
//! sample with value `v` becomes either `(phi(S), v^p)` labeled `+1` or
//! `(phi(S), (R+eps) v^p)` labeled `-1`, chosen by a fair coin. Zero-valued
//! samples never reach the separator; their union `U0` is predicted 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{
    FeatureMap, Featurizer, ItemMaxHypothesis, MetaHypothesis, RootedLinearHypothesis,
};
use crate::itemset::ItemSet;
use crate::linsep::{
    solve_consistent_separator, Label, LabeledPoint, SeparatorOutcome, SeparatorProblem,
};
use crate::subsets::SubsetIndex;
use crate::valuation::{MetaUnitDemand, UnitDemand};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub set: ItemSet,
    pub value: f64,
}

impl Sample {
    pub fn new(set: ItemSet, value: f64) -> Result<Sample> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::field(
                "value",
                format!("sample value {value} is not a finite nonnegative number"),
            ));
        }
        Ok(Sample { set, value })
    }
}

/// Ground-set size shared by all samples; `n` is used when there are none.
fn check_samples(n: usize, samples: &[Sample]) -> Result<()> {
    for (k, s) in samples.iter().enumerate() {
        if s.set.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.set.n(),
            });
        }
        if !s.value.is_finite() || s.value < 0.0 {
            return Err(Error::field(
                format!("samples[{k}].value"),
                format!("invalid value {}", s.value),
            ));
        }
    }
    Ok(())
}

/// Union of all zero-valued sample sets.
pub fn null_subcube(n: usize, samples: &[Sample]) -> ItemSet {
    samples
        .iter()
        .filter(|s| s.value == 0.0)
        .fold(ItemSet::empty(n), |acc, s| acc.union(&s.set))
}

/// Heads: `(phi(S), v^p, +1)`; tails: `(phi(S), scale * v^p, -1)`.
pub fn separator_point(
    features: Vec<f64>,
    value: f64,
    scale: f64,
    p: f64,
    heads: bool,
) -> LabeledPoint {
    let vp = value.powf(p);
    if heads {
        LabeledPoint {
            features,
            last: vp,
            label: Label::Pos,
        }
    } else {
        LabeledPoint {
            features,
            last: scale * vp,
            label: Label::Neg,
        }
    }
}

/// Raw-feature separator examples for positive-valued samples, one coin per
/// sample in order.
pub fn build_separator_examples<G: Rng + ?Sized>(
    samples: &[Sample],
    r: f64,
    eps: f64,
    p: f64,
    coins: &mut G,
) -> Result<Vec<LabeledPoint>> {
    samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if s.value <= 0.0 {
                return Err(Error::field(
                    format!("samples[{k}].value"),
                    "zero-valued sample given to the separator",
                ));
            }
            Ok(separator_point(
                s.set.indicator(),
                s.value,
                r + eps,
                p,
                coins.gen::<bool>(),
            ))
        })
        .collect()
}

/// Solves the separator over `features` with every coordinate touching `u0`
/// forced to 0 and wraps the result as a hypothesis.
pub(crate) fn fit_rooted_linear(
    features: FeatureMap,
    points: Vec<LabeledPoint>,
    u0: ItemSet,
    scale: f64,
    p: f64,
    deflation: f64,
    r: f64,
) -> Result<RootedLinearHypothesis> {
    let masked = features.touching(&u0);
    let prob = SeparatorProblem::new(features.dim(), points, masked)?;
    match solve_consistent_separator(&prob)? {
        SeparatorOutcome::Feasible(sol) => Ok(RootedLinearHypothesis {
            features,
            w: sol.w,
            z: sol.z,
            p,
            scale,
            deflation,
            u0,
        }),
        SeparatorOutcome::Infeasible => Err(Error::SeparatorInfeasible { r, p }),
    }
}

/// PMAC learner through a consistent linear separator over the given featurizer.
///
/// Per training sample: heads samples satisfy `f*(S) < (R+eps)^(1/p) h(S)`,
/// tails samples satisfy `h(S) < f*(S)`, zero samples get `h(S) = 0`.
pub fn pmac_linear_learn<G: Rng + ?Sized>(
    n: usize,
    samples: &[Sample],
    r: f64,
    eps: f64,
    p: f64,
    featurizer: Featurizer,
    coins: &mut G,
) -> Result<RootedLinearHypothesis> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::field("R", format!("must be at least 1, got {r}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::field("eps", format!("must be positive, got {eps}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::field("p", format!("must be positive, got {p}")));
    }
    check_samples(n, samples)?;
    let features = FeatureMap::new(featurizer)?;
    if features.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: features.n(),
        });
    }
    let u0 = null_subcube(n, samples);
    let points = samples
        .iter()
        .filter(|s| s.value > 0.0)
        .map(|s| {
            separator_point(
                features.expand(&s.set),
                s.value,
                r + eps,
                p,
                coins.gen::<bool>(),
            )
        })
        .collect();
    fit_rooted_linear(features, points, u0, r + eps, p, 1.0, r)
}

/// XOS targets: `R = n`, `p = 2`.
pub fn pmac_xos<G: Rng + ?Sized>(
    n: usize,
    samples: &[Sample],
    eps: f64,
    coins: &mut G,
) -> Result<RootedLinearHypothesis> {
    pmac_linear_learn(
        n,
        samples,
        n.max(1) as f64,
        eps,
        2.0,
        Featurizer::Raw { n },
        coins,
    )
}

/// `R` used for subadditive targets: `n (ln n)^2`, at least 1.
pub fn subadditive_r(n: usize) -> f64 {
    let ln = (n as f64).ln();
    (n as f64 * ln * ln).max(1.0)
}

/// Subadditive targets: `R = n ln^2 n`, `p = 2`.
pub fn pmac_subadditive<G: Rng + ?Sized>(
    n: usize,
    samples: &[Sample],
    eps: f64,
    coins: &mut G,
) -> Result<RootedLinearHypothesis> {
    pmac_linear_learn(
        n,
        samples,
        subadditive_r(n),
        eps,
        2.0,
        Featurizer::Raw { n },
        coins,
    )
}

/// OXS targets whose MAX trees have at most `R` leaves: `p = 1`.
pub fn pmac_oxs_r_leaves<G: Rng + ?Sized>(
    n: usize,
    samples: &[Sample],
    r: f64,
    eps: f64,
    coins: &mut G,
) -> Result<RootedLinearHypothesis> {
    pmac_linear_learn(n, samples, r, eps, 1.0, Featurizer::Raw { n }, coins)
}

/// Expansion degree `ceil(1/eta)`.
pub fn expansion_degree(eta: f64) -> Result<usize> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::field(
            "eta",
            format!("must lie in (0, 1], got {eta}"),
        ));
    }
    Ok((1.0 / eta - 1e-12).ceil().max(1.0) as usize)
}

/// XOS targets with at most `R` SUM trees, learned over subset features of
/// degree `L = ceil(1/eta)` with `p = L`.
pub fn pmac_xos_r_trees<G: Rng + ?Sized>(
    n: usize,
    samples: &[Sample],
    r: f64,
    eta: f64,
    eps: f64,
    coins: &mut G,
) -> Result<RootedLinearHypothesis> {
    let degree = expansion_degree(eta)?;
    let featurizer = if degree == 1 {
        Featurizer::Raw { n }
    } else {
        Featurizer::Subsets { n, degree }
    };
    pmac_linear_learn(n, samples, r, eps, degree as f64, featurizer, coins)
}

/// Min rule: each item's value is the least sample value among samples
/// containing it, 0 if no sample contains it.
pub fn unit_demand_learn(n: usize, samples: &[Sample]) -> Result<ItemMaxHypothesis> {
    check_samples(n, samples)?;
    let mut values = vec![f64::INFINITY; n];
    for s in samples {
        for i in s.set.iter() {
            values[i] = values[i].min(s.value);
        }
    }
    for v in &mut values {
        if v.is_infinite() {
            *v = 0.0;
        }
    }
    Ok(ItemMaxHypothesis {
        item_values: values,
    })
}

/// The min rule over meta-items, one per nonempty subset of at most `r`
/// items. Exact on the samples of any OXS target with at most `r` trees.
pub fn pac_oxs_const_trees(n: usize, samples: &[Sample], r: usize) -> Result<MetaHypothesis> {
    check_samples(n, samples)?;
    let bound = (n as u128).saturating_pow(r as u32);
    let limit = crate::hypothesis::FEATURE_LIMIT as u128;
    if bound > limit {
        return Err(Error::guard("n^R meta-items", limit, bound));
    }
    let index = SubsetIndex::new(n, 1, r, limit as usize)?;
    let mut weights = vec![f64::INFINITY; index.len()];
    for s in samples {
        for j in index.subsets_of(&s.set) {
            weights[j] = weights[j].min(s.value);
        }
    }
    for w in &mut weights {
        if w.is_infinite() {
            *w = 0.0;
        }
    }
    Ok(MetaHypothesis(MetaUnitDemand::new(
        index,
        UnitDemand::new(weights)?,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itemset::all_subsets;
    use crate::valuation::{Linear, SetFunction, Xos};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, items: &[usize]) -> ItemSet {
        ItemSet::from_indices(n, items.iter().copied()).unwrap()
    }

    fn full_sample(v: &dyn SetFunction) -> Vec<Sample> {
        all_subsets(v.ground_size())
            .map(|s| Sample::new(s.clone(), v.value_of(&s)).unwrap())
            .collect()
    }

    #[test]
    fn null_subcube_examples() {
        let samples = vec![
            Sample::new(set(4, &[1, 2]), 0.0).unwrap(),
            Sample::new(set(4, &[3]), 4.0).unwrap(),
        ];
        assert_eq!(null_subcube(4, &samples), set(4, &[1, 2]));
        assert_eq!(null_subcube(4, &samples[1..]), ItemSet::empty(4));
        let zeros = vec![
            Sample::new(set(4, &[0]), 0.0).unwrap(),
            Sample::new(set(4, &[3]), 0.0).unwrap(),
        ];
        assert_eq!(null_subcube(4, &zeros), set(4, &[0, 3]));
    }

    #[test]
    fn separator_point_examples() {
        let chi = set(4, &[1, 3]).indicator();
        let heads = separator_point(chi.clone(), 2.0, 1.5, 1.0, true);
        assert_eq!((heads.last, heads.label), (2.0, Label::Pos));
        let tails = separator_point(chi.clone(), 2.0, 1.5, 1.0, false);
        assert_eq!((tails.last, tails.label), (3.0, Label::Neg));
        assert_eq!(separator_point(chi, 2.0, 1.5, 2.0, true).last, 4.0);
    }

    #[test]
    fn zero_sample_is_rejected_by_example_builder() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let samples = vec![Sample::new(set(2, &[0]), 0.0).unwrap()];
        assert!(build_separator_examples(&samples, 1.0, 0.1, 1.0, &mut rng).is_err());
    }

    #[test]
    fn linear_target_exact_within_eps() {
        let target = Linear::new(vec![1.0, 1.0, 1.0]).unwrap();
        let samples: Vec<Sample> = full_sample(&target)
            .into_iter()
            .filter(|s| s.set.len() <= 2)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = pmac_linear_learn(
            3,
            &samples,
            1.0,
            0.1,
            1.0,
            Featurizer::Raw { n: 3 },
            &mut rng,
        )
        .unwrap();
        for s in all_subsets(3).filter(|s| !s.is_empty()) {
            let (f, g) = (target.value_of(&s), h.value_of(&s));
            assert!(
                g > 0.0 && f / g <= 1.1 + 1e-9 && g / f <= 1.1 + 1e-9,
                "{s:?}: {f} vs {g}"
            );
        }
    }

    #[test]
    fn zero_target_gives_zero_hypothesis() {
        let samples: Vec<Sample> = all_subsets(3)
            .map(|s| Sample::new(s, 0.0).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = pmac_xos(3, &samples, 0.1, &mut rng).unwrap();
        assert_eq!(h.u0, ItemSet::full(3));
        assert!(all_subsets(3).all(|s| h.value_of(&s) == 0.0));
    }

    #[test]
    fn xos_per_sample_bounds() {
        let target = Xos::from_dense(&[
            vec![1.0, 2.0, 0.0, 0.0, 1.0, 3.0],
            vec![0.0, 1.0, 4.0, 2.0, 0.0, 0.5],
        ])
        .unwrap();
        let samples = full_sample(&target);
        let eps = 0.1;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = pmac_xos(6, &samples, eps, &mut rng).unwrap();
        let upper = (6.0 + eps).sqrt();
        for s in &samples {
            let g = h.value_of(&s.set);
            if s.value == 0.0 {
                assert_eq!(g, 0.0);
            } else {
                // every sample is either a heads or a tails sample
                assert!(s.value < upper * g + 1e-9 || g < s.value, "{:?}", s.set);
            }
        }
    }

    #[test]
    fn wrong_power_is_reported() {
        // |S|^2 cannot be sandwiched by a linear function with factor 1.1
        let samples: Vec<Sample> = all_subsets(3)
            .map(|s| {
                let v = (s.len() * s.len()) as f64;
                Sample::new(s, v).unwrap()
            })
            .collect();
        let mut failures = 0;
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Err(e) = pmac_linear_learn(
                3,
                &samples,
                1.0,
                0.1,
                1.0,
                Featurizer::Raw { n: 3 },
                &mut rng,
            ) {
                assert!(matches!(e, Error::SeparatorInfeasible { .. }));
                failures += 1;
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn parameter_binding() {
        assert_eq!(expansion_degree(0.5).unwrap(), 2);
        assert_eq!(expansion_degree(1.0).unwrap(), 1);
        assert_eq!(expansion_degree(0.3).unwrap(), 4);
        assert!(expansion_degree(0.0).is_err());
        assert!((subadditive_r(6) - 6.0 * 6f64.ln().powi(2)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let target = Linear::new(vec![1.0, 2.0]).unwrap();
        let h = pmac_xos(2, &full_sample(&target), 0.5, &mut rng).unwrap();
        assert_eq!((h.p, h.scale), (2.0, 2.5));
        let h = pmac_oxs_r_leaves(2, &full_sample(&target), 2.0, 0.5, &mut rng).unwrap();
        assert_eq!((h.p, h.scale), (1.0, 2.5));
    }

    #[test]
    fn min_rule_examples() {
        let samples = vec![
            Sample::new(set(3, &[0, 1]), 5.0).unwrap(),
            Sample::new(set(3, &[1, 2]), 3.0).unwrap(),
            Sample::new(set(3, &[2]), 2.0).unwrap(),
        ];
        let h = unit_demand_learn(3, &samples).unwrap();
        assert_eq!(h.item_values, vec![5.0, 3.0, 2.0]);
        let target = UnitDemand::new(vec![5.0, 3.0, 2.0]).unwrap();
        for s in &samples {
            assert_eq!(h.value_of(&s.set), target.value_of(&s.set));
        }
        assert_eq!(unit_demand_learn(3, &[]).unwrap().item_values, vec![0.0; 3]);
    }

    #[test]
    fn meta_learner_is_exact_on_full_sample() {
        let target = crate::valuation::Oxs::from_dense(&[
            vec![3.0, 1.0, 0.0, 2.0],
            vec![0.0, 2.0, 5.0, 1.0],
        ])
        .unwrap();
        let h = pac_oxs_const_trees(4, &full_sample(&target), 2).unwrap();
        for s in all_subsets(4) {
            assert_eq!(h.value_of(&s), target.value_of(&s), "{s:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let target = Xos::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.5, 1.5, 0.0]]).unwrap();
        let samples = full_sample(&target);
        let a = pmac_xos(3, &samples, 0.2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = pmac_xos(3, &samples, 0.2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }
}
