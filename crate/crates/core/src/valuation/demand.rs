use super::SetFunction;
use crate::error::{Error, Result};
use crate::itemset::{all_subsets, ItemSet};

/// Per-item prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = prices.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(Error::field(
                format!("prices[{i}]"),
                format!("non-finite price {p}"),
            ));
        }
        Ok(PriceVector(prices))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn cost(&self, s: &ItemSet) -> f64 {
        s.iter().map(|i| self.0[i]).fold(0.0, |a, b| a + b)
    }
}

const DEMAND_LIMIT: usize = 20;
const TIE: f64 = 1e-9;

/// All bundles maximizing `v(S) - sum_{j in S} p_j`, ties included, in mask
/// order.
pub fn demand_set(v: &dyn SetFunction, prices: &PriceVector) -> Result<Vec<ItemSet>> {
    let n = v.ground_size();
    if prices.0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: prices.0.len(),
        });
    }
    if n > DEMAND_LIMIT {
        return Err(Error::guard(
            "demand ground set",
            DEMAND_LIMIT as u128,
            n as u128,
        ));
    }
    let payoffs: Vec<(ItemSet, f64)> = all_subsets(n)
        .map(|s| {
            let u = v.value_of(&s) - prices.cost(&s);
            (s, u)
        })
        .collect();
    let best = payoffs
        .iter()
        .map(|(_, u)| *u)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(payoffs
        .into_iter()
        .filter(|(_, u)| *u >= best - TIE)
        .map(|(s, _)| s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{Linear, Oxs};

    #[test]
    fn linear_demand() {
        let v = Linear::new(vec![3.0, 1.0]).unwrap();
        let d = demand_set(&v, &PriceVector::new(vec![2.0, 2.0]).unwrap()).unwrap();
        assert_eq!(d, vec![ItemSet::from_indices(2, [0]).unwrap()]);
    }

    #[test]
    fn free_items_demand_everything() {
        let v = Oxs::from_dense(&[vec![1.0, 2.0, 0.5], vec![0.0, 1.0, 1.0]]).unwrap();
        let d = demand_set(&v, &PriceVector::new(vec![0.0; 3]).unwrap()).unwrap();
        assert!(d.contains(&ItemSet::full(3)));
    }

    #[test]
    fn expensive_items_demand_nothing() {
        let v = Linear::new(vec![3.0, 1.0]).unwrap();
        let d = demand_set(&v, &PriceVector::new(vec![5.0, 5.0]).unwrap()).unwrap();
        assert_eq!(d, vec![ItemSet::empty(2)]);
    }

    #[test]
    fn ties_are_all_reported() {
        let v = Linear::new(vec![2.0, 1.0]).unwrap();
        let d = demand_set(&v, &PriceVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(d.len(), 2);
    }
}
