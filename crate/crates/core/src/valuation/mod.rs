//! Valuation representations and exact evaluation.
//!
//! Every variant is validated at construction (nonnegative finite weights,
//! indices inside the ground set) and is immutable afterwards, so evaluation
//! is a pure function that may be shared freely across threads.

mod construct;
mod convert;
mod demand;
mod json;
pub mod matching;

pub use construct::{build_oxs_budgeted, build_oxs_goemans, goemans_branch, GoemansBranch};
pub use convert::{oxs_to_unit_demand_meta, oxs_to_xos, submodular_to_xos, MetaUnitDemand};
pub use demand::{demand_set, PriceVector};
pub use json::ValuationJson;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// Anything that assigns a real value to subsets of a fixed ground set.
///
/// Implementors provide [`SetFunction::value_of`], which may assume the
/// argument lives on the right ground set; callers that cannot guarantee that
/// use [`SetFunction::eval`].
pub trait SetFunction {
    fn ground_size(&self) -> usize;

    fn value_of(&self, s: &ItemSet) -> f64;

    fn eval(&self, s: &ItemSet) -> Result<f64> {
        if s.n() != self.ground_size() {
            return Err(Error::DimensionMismatch {
                expected: self.ground_size(),
                found: s.n(),
            });
        }
        Ok(self.value_of(s))
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        (**self).value_of(s)
    }
}

fn check_weight(field: &str, w: f64) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::field(field, format!("non-finite weight {w}")));
    }
    if w < 0.0 {
        return Err(Error::field(field, format!("negative weight {w}")));
    }
    Ok(())
}

fn check_weights(field: &str, ws: &[f64]) -> Result<()> {
    for (i, &w) in ws.iter().enumerate() {
        check_weight(&format!("{field}[{i}]"), w)?;
    }
    Ok(())
}

/// Sparse nonnegative leaf weights of one SUM or MAX tree. Zero-weight leaves
/// are dropped; entries are sorted by item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaves {
    entries: Vec<(usize, f64)>,
}

impl Leaves {
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        check_weights("weights", weights)?;
        Ok(Leaves {
            entries: weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(i, &w)| (i, w))
                .collect(),
        })
    }

    /// Leaves from `(item, weight)` pairs; a repeated item keeps the last weight.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (i, w) in pairs {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            check_weight(&format!("weights[{i}]"), w)?;
            entries.push((i, w));
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut dedup: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match dedup.last_mut() {
                Some(last) if last.0 == i => last.1 = w,
                _ => dedup.push((i, w)),
            }
        }
        dedup.retain(|&(_, w)| w > 0.0);
        Ok(Leaves { entries: dedup })
    }

    /// Every item of `set` at the same weight.
    pub fn uniform(set: &ItemSet, weight: f64) -> Result<Self> {
        Leaves::from_pairs(set.n(), set.iter().map(|i| (i, weight)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn max_item(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn weight(&self, item: usize) -> f64 {
        self.entries
            .binary_search_by_key(&item, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for &(i, x) in &self.entries {
            w[i] = x;
        }
        w
    }

    /// `sum_{i in S} w_i`
    pub fn sum_over(&self, s: &ItemSet) -> f64 {
        if s.len() < self.entries.len() {
            s.iter().map(|i| self.weight(i)).fold(0.0, |a, b| a + b)
        } else {
            self.entries
                .iter()
                .filter(|(i, _)| s.contains(*i))
                .map(|(_, w)| w)
                .fold(0.0, |a, b| a + b)
        }
    }

    /// `max_{i in S} w_i`, 0 on sets missing every leaf.
    pub fn max_over(&self, s: &ItemSet) -> f64 {
        self.entries
            .iter()
            .filter(|(i, _)| s.contains(*i))
            .fold(0.0, |acc, &(_, w)| acc.max(w))
    }

    fn scaled(&self, c: f64) -> Leaves {
        Leaves {
            entries: self
                .entries
                .iter()
                .map(|&(i, w)| (i, w * c))
                .filter(|&(_, w)| w > 0.0)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    weights: Vec<f64>,
}

impl Linear {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights("weights", &weights)?;
        Ok(Linear { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Linear {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        s.iter().map(|i| self.weights[i]).fold(0.0, |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitDemand {
    weights: Vec<f64>,
}

impl UnitDemand {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights("weights", &weights)?;
        Ok(UnitDemand { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for UnitDemand {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        s.iter().map(|i| self.weights[i]).fold(0.0, f64::max)
    }
}

/// MAX over SUM trees. Trees may be empty; an empty tree contributes 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Xos {
    n: usize,
    trees: Vec<Leaves>,
}

impl Xos {
    pub fn new(n: usize, trees: Vec<Leaves>) -> Result<Self> {
        check_tree_range(n, &trees)?;
        Ok(Xos { n, trees })
    }

    pub fn from_dense(trees: &[Vec<f64>]) -> Result<Self> {
        let n = trees.first().map_or(0, Vec::len);
        Xos::new(n, dense_trees(n, trees)?)
    }

    pub fn trees(&self) -> &[Leaves] {
        &self.trees
    }

    /// Value `k_j(S)` of every tree.
    pub fn tree_values(&self, s: &ItemSet) -> Vec<f64> {
        self.trees.iter().map(|t| t.sum_over(s)).collect()
    }
}

impl SetFunction for Xos {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.trees.iter().map(|t| t.sum_over(s)).fold(0.0, f64::max)
    }
}

/// SUM over MAX trees, evaluated as a maximum-weight matching between the
/// items of `S` and the trees.
#[derive(Debug, Clone, PartialEq)]
pub struct Oxs {
    n: usize,
    trees: Vec<Leaves>,
}

impl Oxs {
    pub fn new(n: usize, trees: Vec<Leaves>) -> Result<Self> {
        check_tree_range(n, &trees)?;
        Ok(Oxs { n, trees })
    }

    pub fn from_dense(trees: &[Vec<f64>]) -> Result<Self> {
        let n = trees.first().map_or(0, Vec::len);
        Oxs::new(n, dense_trees(n, trees)?)
    }

    pub fn trees(&self) -> &[Leaves] {
        &self.trees
    }

    /// Item-by-tree weight matrix restricted to items of `s` and trees that
    /// have at least one leaf in `s`.
    fn bipartite(&self, s: &ItemSet) -> Vec<Vec<f64>> {
        let live: Vec<&Leaves> = self
            .trees
            .iter()
            .filter(|t| t.iter().any(|(i, _)| s.contains(i)))
            .collect();
        s.iter()
            .map(|i| live.iter().map(|t| t.weight(i)).collect::<Vec<f64>>())
            .filter(|row| row.iter().any(|&w| w > 0.0))
            .collect()
    }
}

impl SetFunction for Oxs {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        matching::max_weight_matching(&self.bipartite(s)).value
    }
}

/// `min(c, |S ∩ R'|)`, evaluated in integers.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetedAdditive {
    set: ItemSet,
    budget: u64,
}

impl BudgetedAdditive {
    pub fn new(set: ItemSet, budget: u64) -> Self {
        BudgetedAdditive { set, budget }
    }
    pub fn set(&self) -> &ItemSet {
        &self.set
    }
    pub fn budget(&self) -> u64 {
        self.budget
    }
    pub fn value_int(&self, s: &ItemSet) -> u64 {
        (s.intersection_len(&self.set) as u64).min(self.budget)
    }
}

impl SetFunction for BudgetedAdditive {
    fn ground_size(&self) -> usize {
        self.set.n()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.value_int(s) as f64
    }
}

/// Matroid rank `min(beta + |S \ R|, |S|, alpha)`, evaluated in integers.
#[derive(Debug, Clone, PartialEq)]
pub struct GoemansRank {
    set: ItemSet,
    alpha: u64,
    beta: u64,
}

impl GoemansRank {
    pub fn new(set: ItemSet, alpha: u64, beta: u64) -> Self {
        GoemansRank { set, alpha, beta }
    }
    pub fn set(&self) -> &ItemSet {
        &self.set
    }
    pub fn alpha(&self) -> u64 {
        self.alpha
    }
    pub fn beta(&self) -> u64 {
        self.beta
    }
    pub fn value_int(&self, s: &ItemSet) -> u64 {
        let size = s.len() as u64;
        let outside = size - s.intersection_len(&self.set) as u64;
        (self.beta + outside).min(size).min(self.alpha)
    }
}

impl SetFunction for GoemansRank {
    fn ground_size(&self) -> usize {
        self.set.n()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.value_int(s) as f64
    }
}

/// Largest ground set a value table may cover.
pub const TABLE_LIMIT: usize = 20;

/// Values of an arbitrary set function on all `2^n` subsets, indexed by
/// bitmask. No structural invariants; the class checkers take these as input.
#[derive(Debug, Clone, PartialEq)]
pub struct SetTable {
    n: usize,
    values: Vec<f64>,
}

impl SetTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > TABLE_LIMIT {
            return Err(Error::guard(
                "table ground set",
                TABLE_LIMIT as u128,
                n as u128,
            ));
        }
        if values.len() != 1 << n {
            return Err(Error::field(
                "values",
                format!(
                    "expected {} entries for n = {n}, got {}",
                    1u64 << n,
                    values.len()
                ),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::field(
                format!("values[{i}]"),
                format!("non-finite value {v}"),
            ));
        }
        Ok(SetTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(&ItemSet) -> f64) -> Result<Self> {
        if n > TABLE_LIMIT {
            return Err(Error::guard(
                "table ground set",
                TABLE_LIMIT as u128,
                n as u128,
            ));
        }
        let values = (0..1u64 << n)
            .map(|m| f(&ItemSet::from_mask(n, m as u128)))
            .collect();
        SetTable::new(n, values)
    }

    /// Tabulates any set function with `n <= limit`.
    pub fn tabulate(f: &dyn SetFunction, limit: usize) -> Result<Self> {
        let n = f.ground_size();
        if n > limit.min(TABLE_LIMIT) {
            return Err(Error::guard(
                "enumerated ground set",
                limit as u128,
                n as u128,
            ));
        }
        SetTable::from_fn(n, |s| f.value_of(s))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, mask: usize) -> f64 {
        self.values[mask]
    }
}

impl SetFunction for SetTable {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        let mask = s.mask().expect("table ground sets are small") as usize;
        self.values[mask]
    }
}

/// A value table that is a valuation: nonnegative, monotone and 0 at the
/// empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitTable(SetTable);

impl ExplicitTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        ExplicitTable::from_table(SetTable::new(n, values)?)
    }

    pub fn from_table(table: SetTable) -> Result<Self> {
        if table.values[0] != 0.0 {
            return Err(Error::field(
                "values[0]",
                "value of the empty set must be 0",
            ));
        }
        for (mask, &v) in table.values.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::field(
                    format!("values[{mask}]"),
                    format!("negative value {v}"),
                ));
            }
            for i in 0..table.n {
                let bigger = mask | 1 << i;
                if bigger != mask && table.values[bigger] < v {
                    return Err(Error::NotMonotone(format!(
                        "values[{bigger}] = {} < values[{mask}] = {v}",
                        table.values[bigger]
                    )));
                }
            }
        }
        Ok(ExplicitTable(table))
    }

    pub fn table(&self) -> &SetTable {
        &self.0
    }
}

impl SetFunction for ExplicitTable {
    fn ground_size(&self) -> usize {
        self.0.n
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.0.value_of(s)
    }
}

fn check_tree_range(n: usize, trees: &[Leaves]) -> Result<()> {
    for (j, t) in trees.iter().enumerate() {
        if let Some(i) = t.max_item() {
            if i >= n {
                return Err(Error::field(
                    format!("trees[{j}]"),
                    format!("item {i} outside ground set of size {n}"),
                ));
            }
        }
    }
    Ok(())
}

fn dense_trees(n: usize, trees: &[Vec<f64>]) -> Result<Vec<Leaves>> {
    trees
        .iter()
        .enumerate()
        .map(|(j, w)| {
            if w.len() != n {
                return Err(Error::field(
                    format!("trees[{j}]"),
                    format!("expected {n} weights, got {}", w.len()),
                ));
            }
            check_weights(&format!("trees[{j}]"), w)?;
            Leaves::from_dense(w)
        })
        .collect()
}

/// One valuation in any of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    Linear(Linear),
    UnitDemand(UnitDemand),
    Xos(Xos),
    Oxs(Oxs),
    Budgeted(BudgetedAdditive),
    Goemans(GoemansRank),
    Table(ExplicitTable),
}

impl Valuation {
    pub fn kind(&self) -> &'static str {
        match self {
            Valuation::Linear(_) => "linear",
            Valuation::UnitDemand(_) => "unit_demand",
            Valuation::Xos(_) => "xos",
            Valuation::Oxs(_) => "oxs",
            Valuation::Budgeted(_) => "budgeted",
            Valuation::Goemans(_) => "goemans",
            Valuation::Table(_) => "table",
        }
    }

    fn inner(&self) -> &dyn SetFunction {
        match self {
            Valuation::Linear(v) => v,
            Valuation::UnitDemand(v) => v,
            Valuation::Xos(v) => v,
            Valuation::Oxs(v) => v,
            Valuation::Budgeted(v) => v,
            Valuation::Goemans(v) => v,
            Valuation::Table(v) => v,
        }
    }

    /// `c * v` for variants that carry a weight payload.
    pub fn scaled(&self, c: f64) -> Result<Valuation> {
        check_weight("scale", c)?;
        Ok(match self {
            Valuation::Linear(v) => {
                Valuation::Linear(Linear::new(v.weights.iter().map(|w| w * c).collect())?)
            }
            Valuation::UnitDemand(v) => {
                Valuation::UnitDemand(UnitDemand::new(v.weights.iter().map(|w| w * c).collect())?)
            }
            Valuation::Xos(v) => Valuation::Xos(Xos {
                n: v.n,
                trees: v.trees.iter().map(|t| t.scaled(c)).collect(),
            }),
            Valuation::Oxs(v) => Valuation::Oxs(Oxs {
                n: v.n,
                trees: v.trees.iter().map(|t| t.scaled(c)).collect(),
            }),
            Valuation::Table(v) => Valuation::Table(ExplicitTable::new(
                v.0.n,
                v.0.values.iter().map(|x| x * c).collect(),
            )?),
            Valuation::Budgeted(_) | Valuation::Goemans(_) => {
                return Err(Error::field(
                    "kind",
                    format!("{} has no weight payload to scale", self.kind()),
                ))
            }
        })
    }
}

impl SetFunction for Valuation {
    fn ground_size(&self) -> usize {
        self.inner().ground_size()
    }
    fn value_of(&self, s: &ItemSet) -> f64 {
        self.inner().value_of(s)
    }
}

macro_rules! impl_from {
    ($($t:ident => $v:ident),*) => {
        $(impl From<$t> for Valuation {
            fn from(x: $t) -> Self {
                Valuation::$v(x)
            }
        })*
    };
}

impl_from!(Linear => Linear, UnitDemand => UnitDemand, Xos => Xos, Oxs => Oxs,
    BudgetedAdditive => Budgeted, GoemansRank => Goemans, ExplicitTable => Table);

/// Exact maximum over all assignments of the items of `S` to trees (or to
/// nothing), computed by a dynamic program over the blocks of the partition.
/// Independent of the matching evaluator; used as its oracle.
pub fn eval_oxs_bruteforce(v: &Oxs, s: &ItemSet) -> Result<f64> {
    if s.n() != v.n {
        return Err(Error::DimensionMismatch {
            expected: v.n,
            found: s.n(),
        });
    }
    if s.len() > 12 {
        return Err(Error::guard("brute-force set size", 12, s.len() as u128));
    }
    if v.trees.len() > 8 {
        return Err(Error::guard(
            "brute-force tree count",
            8,
            v.trees.len() as u128,
        ));
    }
    let items = s.to_vec();
    let k = items.len();
    let full = (1usize << k) - 1;
    // best[T]: best value of assigning exactly the items in T to the trees seen so far
    let mut best = vec![0.0f64; 1 << k];
    for tree in &v.trees {
        // unit-demand value of each block under this tree
        let block: Vec<f64> = (0..=full)
            .map(|b| {
                (0..k)
                    .filter(|&p| b >> p & 1 == 1)
                    .map(|p| tree.weight(items[p]))
                    .fold(0.0, f64::max)
            })
            .collect();
        let mut next = best.clone();
        for t in 0..=full {
            let mut sub = t;
            loop {
                let cand = best[t & !sub] + block[sub];
                if cand > next[t] {
                    next[t] = cand;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & t;
            }
        }
        best = next;
    }
    // Items left out of every block are discarded; best[] is monotone in T.
    Ok(best.into_iter().fold(0.0, f64::max))
}
