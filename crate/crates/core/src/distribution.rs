//! Distributions over subsets of `[n]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub dist: Distribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Every subset equally likely.
    UniformSubsets { n: usize },
    /// Item `i` included independently with probability `probs[i]`.
    Product { probs: Vec<f64> },
    /// A uniformly chosen member of `sets`.
    UniformOverFamily { sets: Vec<ItemSet> },
    /// A component chosen with probability proportional to its weight.
    Mixture { components: Vec<MixtureComponent> },
}

impl Distribution {
    pub fn product(n: usize, prob: f64) -> Distribution {
        Distribution::Product {
            probs: vec![prob; n],
        }
    }

    /// Ground-set size; validates the whole description.
    pub fn validate(&self) -> Result<usize> {
        match self {
            Distribution::UniformSubsets { n } => Ok(*n),
            Distribution::Product { probs } => {
                if let Some(i) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::field(
                        format!("probs[{i}]"),
                        "probability outside [0, 1]",
                    ));
                }
                Ok(probs.len())
            }
            Distribution::UniformOverFamily { sets } => {
                let Some(first) = sets.first() else {
                    return Err(Error::field("sets", "family is empty"));
                };
                if let Some(k) = sets.iter().position(|s| s.n() != first.n()) {
                    return Err(Error::field(
                        format!("sets[{k}]"),
                        "ground-set size differs",
                    ));
                }
                Ok(first.n())
            }
            Distribution::Mixture { components } => {
                let Some(first) = components.first() else {
                    return Err(Error::field("components", "mixture is empty"));
                };
                let n = first.dist.validate()?;
                let mut total = 0.0;
                for (k, c) in components.iter().enumerate() {
                    if !(c.weight >= 0.0 && c.weight.is_finite()) {
                        return Err(Error::field(
                            format!("components[{k}].weight"),
                            "weight must be finite and nonnegative",
                        ));
                    }
                    if c.dist.validate()? != n {
                        return Err(Error::field(
                            format!("components[{k}]"),
                            "ground-set size differs",
                        ));
                    }
                    total += c.weight;
                }
                if total <= 0.0 {
                    return Err(Error::field("components", "weights sum to 0"));
                }
                Ok(n)
            }
        }
    }

    /// Draws one set. The description must be valid.
    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> ItemSet {
        match self {
            Distribution::UniformSubsets { n } => {
                if *n <= 128 {
                    let mask: u128 = rng.gen();
                    let mask = if *n == 128 {
                        mask
                    } else {
                        mask & ((1u128 << n) - 1)
                    };
                    ItemSet::from_mask(*n, mask)
                } else {
                    let items: Vec<usize> = (0..*n).filter(|_| rng.gen::<bool>()).collect();
                    ItemSet::from_indices(*n, items).expect("in range")
                }
            }
            Distribution::Product { probs } => {
                let items: Vec<usize> = (0..probs.len())
                    .filter(|&i| rng.gen::<f64>() < probs[i])
                    .collect();
                ItemSet::from_indices(probs.len(), items).expect("in range")
            }
            Distribution::UniformOverFamily { sets } => sets[rng.gen_range(0..sets.len())].clone(),
            Distribution::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                let mut x = rng.gen::<f64>() * total;
                for c in components {
                    if x < c.weight {
                        return c.dist.sample(rng);
                    }
                    x -= c.weight;
                }
                components.last().expect("nonempty").dist.sample(rng)
            }
        }
    }

    pub fn sample_many<G: Rng + ?Sized>(&self, count: usize, rng: &mut G) -> Vec<ItemSet> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}
