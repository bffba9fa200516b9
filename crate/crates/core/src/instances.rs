//! Instance generators: the intersection family and its coverage targets, the
//! matroid-rank pair, and random members of each class.

use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::valuation::{
    build_oxs_budgeted, build_oxs_goemans, BudgetedAdditive, GoemansRank, Leaves, Linear, Oxs,
    UnitDemand, Valuation, Xos,
};

/// Largest number of rejected draws before giving up.
pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyAudit {
    pub sizes: Vec<usize>,
    pub min_size: usize,
    pub max_size: usize,
    /// Allowed sizes `[sqrt(n)/2, 2 sqrt(n)]`.
    pub size_bounds: (usize, usize),
    pub max_intersection: usize,
    /// `log2 n`.
    pub intersection_bound: usize,
    pub pairs_audited: usize,
    pub rejections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionFamily {
    pub n: usize,
    pub sets: Vec<ItemSet>,
    pub audit: FamilyAudit,
}

impl IntersectionFamily {
    /// Recomputes the audit and checks it against the bounds.
    pub fn verify(&self) -> bool {
        let a = audit(self.n, &self.sets, self.audit.rejections);
        a == self.audit
            && a.min_size >= a.size_bounds.0
            && a.max_size <= a.size_bounds.1
            && a.max_intersection <= a.intersection_bound
    }
}

fn bounds(n: usize) -> ((usize, usize), usize) {
    let root = (n as f64).sqrt();
    let lo = (root / 2.0).ceil() as usize;
    let hi = (2.0 * root).floor() as usize;
    ((lo, hi), n.ilog2() as usize)
}

fn audit(n: usize, sets: &[ItemSet], rejections: usize) -> FamilyAudit {
    let (size_bounds, intersection_bound) = bounds(n);
    let sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let mut max_intersection = 0;
    let mut pairs = 0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            max_intersection = max_intersection.max(sets[i].intersection_len(&sets[j]));
            pairs += 1;
        }
    }
    FamilyAudit {
        min_size: sizes.iter().copied().min().unwrap_or(0),
        max_size: sizes.iter().copied().max().unwrap_or(0),
        sizes,
        size_bounds,
        max_intersection,
        intersection_bound,
        pairs_audited: pairs,
        rejections,
    }
}

/// `k` sets, each including every item independently with probability
/// `1/sqrt(n)`, redrawn until its size lies in `[sqrt(n)/2, 2 sqrt(n)]` and
/// it meets every earlier set in at most `log2 n` items.
pub fn gen_intersection_family(n: usize, k: usize, seed: u64) -> Result<IntersectionFamily> {
    if n < 1024 || !n.is_power_of_two() {
        return Err(Error::field(
            "n",
            format!("must be a power of two >= 1024, got {n}"),
        ));
    }
    if k == 0 || k > n {
        return Err(Error::field("k", format!("must lie in [1, n], got {k}")));
    }
    let (size_bounds, cap) = bounds(n);
    let q = 1.0 / (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<ItemSet> = Vec::with_capacity(k);
    let mut rejections = 0;
    while sets.len() < k {
        let items: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < q).collect();
        let ok = (size_bounds.0..=size_bounds.1).contains(&items.len()) && {
            let cand = ItemSet::from_indices(n, items.iter().copied())?;
            let fits = sets.iter().all(|s| s.intersection_len(&cand) <= cap);
            if fits {
                sets.push(cand);
            }
            fits
        };
        if !ok {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::Generation(format!(
                    "intersection family n = {n}, k = {k}: more than {MAX_REJECTIONS} rejections"
                )));
            }
        }
    }
    let audit = audit(n, &sets, rejections);
    debug_assert!(audit.max_intersection <= cap);
    Ok(IntersectionFamily { n, sets, audit })
}

/// `f_B(S) = max_{i in B} |S ∩ A_i|`, one unit-weight SUM tree per member.
pub fn build_fb(family: &IntersectionFamily, b: &[usize]) -> Result<Xos> {
    build_fb_from_sets(family.n, &family.sets, b)
}

pub fn build_fb_from_sets(n: usize, sets: &[ItemSet], b: &[usize]) -> Result<Xos> {
    let trees = b
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let a = sets
                .get(i)
                .ok_or_else(|| Error::field(format!("B[{k}]"), format!("no family member {i}")))?;
            Leaves::uniform(a, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Xos::new(n, trees)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoemansPair {
    pub n: usize,
    pub alpha: u64,
    pub beta: u64,
    pub rset: ItemSet,
    /// `min(|S|, alpha)`.
    pub g23: Valuation,
    /// `min(beta + |S \ R|, |S|, alpha)`.
    pub g_r: Valuation,
    /// `g23` as OXS trees.
    pub g23_oxs: Valuation,
    /// `g_r` as OXS trees.
    pub g_r_oxs: Valuation,
}

/// `alpha = round(x sqrt(n)/5)`, `beta = round(x^2/5)` and a uniform `R` of
/// size `alpha`. Requires `x >= 4 sqrt(log2 n)`.
pub fn gen_goemans_pair(n: usize, x: f64, seed: u64) -> Result<GoemansPair> {
    if n < 2 {
        return Err(Error::field("n", "must be at least 2"));
    }
    let floor = 4.0 * (n as f64).log2().sqrt();
    if x.is_nan() || x < floor {
        return Err(Error::field(
            "x",
            format!("must be at least 4 sqrt(log2 n) = {floor:.3}, got {x}"),
        ));
    }
    let alpha = (x * (n as f64).sqrt() / 5.0).round() as u64;
    let beta = (x * x / 5.0).round() as u64;
    if alpha == 0 || alpha as usize > n {
        return Err(Error::field(
            "x",
            format!("alpha = {alpha} must lie in [1, n]"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rset = ItemSet::from_indices(n, sample_indices(&mut rng, n, alpha as usize))?;
    let full = ItemSet::full(n);
    Ok(GoemansPair {
        n,
        alpha,
        beta,
        g23: BudgetedAdditive::new(full.clone(), alpha).into(),
        g_r: GoemansRank::new(rset.clone(), alpha, beta).into(),
        g23_oxs: build_oxs_budgeted(&full, alpha).into(),
        g_r_oxs: build_oxs_goemans(&rset, alpha, beta, n)?.into(),
        rset,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomClass {
    Linear,
    UnitDemand,
    Xos,
    Oxs,
    Budgeted,
    Goemans,
}

impl FromStr for RandomClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<RandomClass> {
        Ok(match s.replace('-', "_").as_str() {
            "linear" => RandomClass::Linear,
            "unit_demand" => RandomClass::UnitDemand,
            "xos" => RandomClass::Xos,
            "oxs" => RandomClass::Oxs,
            "budgeted" => RandomClass::Budgeted,
            "goemans" => RandomClass::Goemans,
            _ => {
                return Err(Error::Unknown {
                    what: "class",
                    name: s.to_string(),
                })
            }
        })
    }
}

/// Shape of random instances. Tree counts are uniform in
/// `[min_trees, max_trees]`, leaf counts uniform in `[1, max_leaves]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomParams {
    pub min_trees: usize,
    pub max_trees: usize,
    /// `None` means up to `n` leaves.
    pub max_leaves: Option<usize>,
    /// Weights are uniform in `(0, weight_max]`, or in `1..=weight_max` when
    /// `integer` is set.
    pub weight_max: f64,
    pub integer: bool,
    /// Probability that a linear weight is 0.
    pub zero_prob: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            min_trees: 1,
            max_trees: 3,
            max_leaves: None,
            weight_max: 1.0,
            integer: false,
            zero_prob: 0.0,
        }
    }
}

impl RandomParams {
    fn validate(&self) -> Result<()> {
        if self.min_trees > self.max_trees {
            return Err(Error::field("min_trees", "exceeds max_trees"));
        }
        if !(self.weight_max > 0.0 && self.weight_max.is_finite()) {
            return Err(Error::field("weight_max", "must be positive"));
        }
        if self.integer && self.weight_max < 1.0 {
            return Err(Error::field(
                "weight_max",
                "integer weights need weight_max >= 1",
            ));
        }
        if self.max_leaves == Some(0) {
            return Err(Error::field("max_leaves", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.zero_prob) {
            return Err(Error::field("zero_prob", "must lie in [0, 1]"));
        }
        Ok(())
    }

    fn weight<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        if self.integer {
            rng.gen_range(1..=self.weight_max.floor() as u64) as f64
        } else {
            // (0, weight_max]
            self.weight_max * (1.0 - rng.gen::<f64>())
        }
    }

    fn tree<G: Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Result<Leaves> {
        let cap = self.max_leaves.unwrap_or(n).min(n).max(1);
        let leaves = rng.gen_range(1..=cap);
        let items = sample_indices(rng, n, leaves).into_vec();
        let pairs: Vec<(usize, f64)> = items.into_iter().map(|i| (i, self.weight(rng))).collect();
        Leaves::from_pairs(n, pairs)
    }

    fn trees<G: Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Result<Vec<Leaves>> {
        let count = rng.gen_range(self.min_trees..=self.max_trees);
        (0..count).map(|_| self.tree(n, rng)).collect()
    }
}

/// A random member of `class` on `[n]`, reproducible from `rng`.
pub fn gen_random_with<G: Rng + ?Sized>(
    class: RandomClass,
    n: usize,
    params: &RandomParams,
    rng: &mut G,
) -> Result<Valuation> {
    params.validate()?;
    if n == 0 {
        return Err(Error::field("n", "must be at least 1"));
    }
    let weights = |rng: &mut G| -> Vec<f64> {
        (0..n)
            .map(|_| {
                if rng.gen::<f64>() < params.zero_prob {
                    0.0
                } else {
                    params.weight(rng)
                }
            })
            .collect()
    };
    Ok(match class {
        RandomClass::Linear => Linear::new(weights(rng))?.into(),
        RandomClass::UnitDemand => UnitDemand::new(weights(rng))?.into(),
        RandomClass::Xos => Xos::new(n, params.trees(n, rng)?)?.into(),
        RandomClass::Oxs => Oxs::new(n, params.trees(n, rng)?)?.into(),
        RandomClass::Budgeted => {
            let size = rng.gen_range(1..=n);
            let set = ItemSet::from_indices(n, sample_indices(rng, n, size))?;
            BudgetedAdditive::new(set, rng.gen_range(0..=n as u64)).into()
        }
        RandomClass::Goemans => {
            let size = rng.gen_range(0..=n);
            let set = ItemSet::from_indices(n, sample_indices(rng, n, size))?;
            let alpha = rng.gen_range(0..=n as u64 + 1);
            let beta = rng.gen_range(0..=n as u64 + 1);
            GoemansRank::new(set, alpha, beta).into()
        }
    })
}

pub fn gen_random(
    class: RandomClass,
    n: usize,
    params: &RandomParams,
    seed: u64,
) -> Result<Valuation> {
    gen_random_with(class, n, params, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{check_gs_triples, check_monotone, check_subadditive, check_submodular};
    use crate::valuation::SetFunction;

    fn set(n: usize, items: &[usize]) -> ItemSet {
        ItemSet::from_indices(n, items.iter().copied()).unwrap()
    }

    #[test]
    fn family_small_cases() {
        let one = gen_intersection_family(1024, 1, 3).unwrap();
        assert_eq!(one.audit.pairs_audited, 0);
        assert!(one.verify());
        let two = gen_intersection_family(1024, 2, 3).unwrap();
        assert_eq!(two.audit.pairs_audited, 1);
        assert!(two.verify());
        assert_eq!(gen_intersection_family(1024, 2, 3).unwrap(), two);
        assert!(gen_intersection_family(1000, 2, 0).is_err());
    }

    #[test]
    fn fb_examples() {
        let sets = vec![set(4, &[0, 1]), set(4, &[1, 2])];
        let f = build_fb_from_sets(4, &sets, &[0]).unwrap();
        assert_eq!(f.value_of(&sets[1]), 1.0);
        assert_eq!(f.value_of(&sets[0]), 2.0);
        let empty = build_fb_from_sets(4, &sets, &[]).unwrap();
        assert_eq!(empty.value_of(&ItemSet::full(4)), 0.0);
        assert!(build_fb_from_sets(4, &sets, &[2]).is_err());
    }

    #[test]
    fn goemans_pair_shape() {
        let n = 256;
        let x = 4.0 * 8f64.sqrt();
        let pair = gen_goemans_pair(n, x, 1).unwrap();
        assert_eq!(pair.rset.len() as u64, pair.alpha);
        assert!(pair.beta < pair.alpha);
        assert_eq!(pair.g_r.value_of(&pair.rset), pair.beta as f64);
        let small = set(n, &[0, 5, 9]);
        assert_eq!(pair.g23.value_of(&small), 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let s = crate::distribution::Distribution::product(n, 0.1).sample(&mut rng);
            assert_eq!(pair.g23.value_of(&s), pair.g23_oxs.value_of(&s));
            assert_eq!(pair.g_r.value_of(&s), pair.g_r_oxs.value_of(&s));
        }
        assert!(gen_goemans_pair(n, 1.0, 0).is_err());
    }

    #[test]
    fn random_instances_are_in_class() {
        let p = RandomParams::default();
        for seed in 0..10 {
            let oxs = gen_random(RandomClass::Oxs, 5, &p, seed).unwrap();
            assert!(check_gs_triples(&oxs).unwrap().passed());
            let lin = gen_random(RandomClass::Linear, 5, &p, seed).unwrap();
            assert!(check_monotone(&lin).unwrap().passed());
            assert!(check_submodular(&lin).unwrap().passed());
            let xos = gen_random(RandomClass::Xos, 5, &p, seed).unwrap();
            assert!(check_subadditive(&xos).unwrap().passed());
        }
        assert_eq!(
            gen_random(RandomClass::Xos, 8, &p, 42).unwrap(),
            gen_random(RandomClass::Xos, 8, &p, 42).unwrap()
        );
    }

    #[test]
    fn tree_shape_respected() {
        let p = RandomParams {
            min_trees: 2,
            max_trees: 2,
            max_leaves: Some(2),
            integer: true,
            weight_max: 3.0,
            ..Default::default()
        };
        let Valuation::Xos(x) = gen_random(RandomClass::Xos, 6, &p, 7).unwrap() else {
            panic!()
        };
        assert_eq!(x.trees().len(), 2);
        assert!(x
            .trees()
            .iter()
            .all(|t| t.len() <= 2 && t.iter().all(|(_, w)| w.fract() == 0.0)));
    }
}
