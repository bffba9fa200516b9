//! JSON valuation schema:
//! `{"n": int, "kind": "linear"|"unit_demand"|"xos"|"oxs"|"budgeted"|"goemans"|"table", ...}`.
//!
//! Tree lists accept either dense weight arrays of length `n` or sparse
//! `{"items": [...], "weights": [...]}` objects. Dense arrays are written for
//! `n <= 64`, sparse objects above that.

use serde::{Deserialize, Serialize};

use super::{
    BudgetedAdditive, ExplicitTable, GoemansRank, Leaves, Linear, Oxs, UnitDemand, Valuation, Xos,
};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeJson {
    Dense(Vec<f64>),
    Sparse {
        items: Vec<usize>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationJson {
    Linear {
        n: usize,
        weights: Vec<f64>,
    },
    UnitDemand {
        n: usize,
        weights: Vec<f64>,
    },
    Xos {
        n: usize,
        trees: Vec<TreeJson>,
    },
    Oxs {
        n: usize,
        trees: Vec<TreeJson>,
    },
    Budgeted {
        n: usize,
        set: Vec<usize>,
        budget: u64,
    },
    Goemans {
        n: usize,
        set: Vec<usize>,
        alpha: u64,
        beta: u64,
    },
    Table {
        n: usize,
        values: Vec<f64>,
    },
}

fn weights_field(field: &str, n: usize, w: &[f64]) -> Result<()> {
    if w.len() != n {
        return Err(Error::field(
            field,
            format!("expected {n} weights, got {}", w.len()),
        ));
    }
    for (i, &x) in w.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::field(
                format!("{field}[{i}]"),
                format!("invalid weight {x}"),
            ));
        }
    }
    Ok(())
}

fn trees_field(n: usize, trees: &[TreeJson]) -> Result<Vec<Leaves>> {
    trees
        .iter()
        .enumerate()
        .map(|(j, t)| match t {
            TreeJson::Dense(w) => {
                weights_field(&format!("trees[{j}]"), n, w)?;
                Leaves::from_dense(w)
            }
            TreeJson::Sparse { items, weights } => {
                if items.len() != weights.len() {
                    return Err(Error::field(
                        format!("trees[{j}].weights"),
                        "items and weights differ in length",
                    ));
                }
                for (k, (&i, &w)) in items.iter().zip(weights).enumerate() {
                    if i >= n {
                        return Err(Error::field(
                            format!("trees[{j}].items[{k}]"),
                            format!("index {i} out of range for n = {n}"),
                        ));
                    }
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::field(
                            format!("trees[{j}].weights[{k}]"),
                            format!("invalid weight {w}"),
                        ));
                    }
                }
                Leaves::from_pairs(n, items.iter().copied().zip(weights.iter().copied()))
            }
        })
        .collect()
}

fn set_field(n: usize, set: &[usize]) -> Result<ItemSet> {
    for (k, &i) in set.iter().enumerate() {
        if i >= n {
            return Err(Error::field(
                format!("set[{k}]"),
                format!("index {i} out of range for n = {n}"),
            ));
        }
    }
    ItemSet::from_indices(n, set.iter().copied())
}

impl TryFrom<ValuationJson> for Valuation {
    type Error = Error;

    fn try_from(raw: ValuationJson) -> Result<Valuation> {
        Ok(match raw {
            ValuationJson::Linear { n, weights } => {
                weights_field("weights", n, &weights)?;
                Linear::new(weights)?.into()
            }
            ValuationJson::UnitDemand { n, weights } => {
                weights_field("weights", n, &weights)?;
                UnitDemand::new(weights)?.into()
            }
            ValuationJson::Xos { n, trees } => Xos::new(n, trees_field(n, &trees)?)?.into(),
            ValuationJson::Oxs { n, trees } => Oxs::new(n, trees_field(n, &trees)?)?.into(),
            ValuationJson::Budgeted { n, set, budget } => {
                BudgetedAdditive::new(set_field(n, &set)?, budget).into()
            }
            ValuationJson::Goemans {
                n,
                set,
                alpha,
                beta,
            } => GoemansRank::new(set_field(n, &set)?, alpha, beta).into(),
            ValuationJson::Table { n, values } => ExplicitTable::new(n, values)?.into(),
        })
    }
}

fn tree_json(n: usize, t: &Leaves) -> TreeJson {
    if n <= 64 {
        TreeJson::Dense(t.to_dense(n))
    } else {
        let (items, weights) = t.iter().unzip();
        TreeJson::Sparse { items, weights }
    }
}

impl From<&Valuation> for ValuationJson {
    fn from(v: &Valuation) -> Self {
        use crate::valuation::SetFunction;
        let n = v.ground_size();
        match v {
            Valuation::Linear(x) => ValuationJson::Linear {
                n,
                weights: x.weights().to_vec(),
            },
            Valuation::UnitDemand(x) => ValuationJson::UnitDemand {
                n,
                weights: x.weights().to_vec(),
            },
            Valuation::Xos(x) => ValuationJson::Xos {
                n,
                trees: x.trees().iter().map(|t| tree_json(n, t)).collect(),
            },
            Valuation::Oxs(x) => ValuationJson::Oxs {
                n,
                trees: x.trees().iter().map(|t| tree_json(n, t)).collect(),
            },
            Valuation::Budgeted(x) => ValuationJson::Budgeted {
                n,
                set: x.set().to_vec(),
                budget: x.budget(),
            },
            Valuation::Goemans(x) => ValuationJson::Goemans {
                n,
                set: x.set().to_vec(),
                alpha: x.alpha(),
                beta: x.beta(),
            },
            Valuation::Table(x) => ValuationJson::Table {
                n,
                values: x.table().values().to_vec(),
            },
        }
    }
}

impl From<Valuation> for ValuationJson {
    fn from(v: Valuation) -> Self {
        ValuationJson::from(&v)
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ValuationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ValuationJson::deserialize(d)?;
        Valuation::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl Valuation {
    pub fn from_json(text: &str) -> Result<Valuation> {
        let raw: ValuationJson =
            serde_json::from_str(text).map_err(|e| Error::field("json", e.to_string()))?;
        Valuation::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("valuations always serialize")
    }
}
