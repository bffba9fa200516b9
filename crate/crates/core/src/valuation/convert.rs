//! Value-preserving conversions between representations.

use super::{ExplicitTable, Leaves, Oxs, SetFunction, UnitDemand, Xos};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::oracles::{check_submodular, Verdict};
use crate::subsets::SubsetIndex;

const CONVERSION_LIMIT: u128 = 1_000_000;

/// XOS form of an OXS function: one SUM tree per choice of at most one leaf
/// from every MAX tree.
///
/// Choices that pick the same item from two MAX trees are skipped; a SUM tree
/// counting one item twice would exceed the matching value. The all-empty
/// choice is skipped as well, so an OXS with no leaves yields no SUM trees.
pub fn oxs_to_xos(v: &Oxs) -> Result<Xos> {
    let mut product: u128 = 1;
    for t in v.trees() {
        product = product.saturating_mul(t.len() as u128 + 1);
        if product > CONVERSION_LIMIT {
            return Err(Error::guard("SUM-tree count", CONVERSION_LIMIT, product));
        }
    }
    let trees: Vec<Vec<(usize, f64)>> = v.trees().iter().map(|t| t.iter().collect()).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, f64)> = Vec::with_capacity(trees.len());

    fn rec(
        trees: &[Vec<(usize, f64)>],
        depth: usize,
        chosen: &mut Vec<(usize, f64)>,
        n: usize,
        out: &mut Vec<Leaves>,
    ) -> Result<()> {
        if depth == trees.len() {
            if !chosen.is_empty() {
                out.push(Leaves::from_pairs(n, chosen.iter().copied())?);
            }
            return Ok(());
        }
        rec(trees, depth + 1, chosen, n, out)?;
        for &(item, w) in &trees[depth] {
            if chosen.iter().any(|&(i, _)| i == item) {
                continue;
            }
            chosen.push((item, w));
            rec(trees, depth + 1, chosen, n, out)?;
            chosen.pop();
        }
        Ok(())
    }

    rec(&trees, 0, &mut chosen, v.ground_size(), &mut out)?;
    Xos::new(v.ground_size(), out)
}

/// A unit-demand function over meta-items, one per subset of at most `R`
/// real items. A real set `S` is evaluated on its meta-set
/// `{ i_T : T ⊆ S, |T| <= R }`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaUnitDemand {
    pub index: SubsetIndex,
    pub unit_demand: UnitDemand,
}

impl MetaUnitDemand {
    pub fn new(index: SubsetIndex, unit_demand: UnitDemand) -> Result<Self> {
        if unit_demand.ground_size() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: unit_demand.ground_size(),
            });
        }
        Ok(MetaUnitDemand { index, unit_demand })
    }

    pub fn meta_set(&self, s: &ItemSet) -> ItemSet {
        ItemSet::from_indices(self.index.len(), self.index.subsets_of(s))
            .expect("indices come from the index")
    }
}

impl SetFunction for MetaUnitDemand {
    fn ground_size(&self) -> usize {
        self.index.n()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        let w = self.unit_demand.weights();
        self.index
            .subsets_of(s)
            .into_iter()
            .map(|i| w[i])
            .fold(0.0, f64::max)
    }
}

/// Meta-item unit-demand form of an OXS function with at most `r` trees; the
/// meta-item for `T` carries weight `v(T)`.
pub fn oxs_to_unit_demand_meta(v: &Oxs, r: usize) -> Result<MetaUnitDemand> {
    let n = v.ground_size();
    let bound = (n as u128).saturating_pow(r as u32);
    if bound > CONVERSION_LIMIT {
        return Err(Error::guard("n^R meta-items", CONVERSION_LIMIT, bound));
    }
    let index = SubsetIndex::new(n, 0, r, CONVERSION_LIMIT as usize)?;
    let mut weights = vec![0.0; index.len()];
    index.for_each(|i, members| {
        let t = ItemSet::from_indices(n, members.iter().copied()).expect("in range");
        weights[i] = v.value_of(&t);
    });
    MetaUnitDemand::new(index, UnitDemand::new(weights)?)
}

/// XOS form of a submodular table: one SUM tree per permutation, assigning each
/// item its marginal value along the permutation.
pub fn submodular_to_xos(v: &ExplicitTable) -> Result<Xos> {
    let n = v.ground_size();
    if n > 7 {
        return Err(Error::guard("permutation ground set", 7, n as u128));
    }
    if let Verdict::Fail(w) = check_submodular(v.table())? {
        return Err(Error::NotSubmodular(format!("{w:?}")));
    }
    let table = v.table();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut trees = Vec::new();
    loop {
        let mut weights = vec![0.0; n];
        let mut prefix = 0usize;
        for &item in &perm {
            let next = prefix | 1 << item;
            weights[item] = table.at(next) - table.at(prefix);
            prefix = next;
        }
        trees.push(Leaves::from_dense(&weights)?);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Xos::new(n, trees)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
