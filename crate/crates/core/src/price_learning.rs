//! Learning from buy/no-buy answers to posted bundle prices.
//!
//! The learner never sees a value: [`AgentOracle`] exposes only
//! [`AgentOracle::buys`].

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::hypothesis::{FeatureMap, Hypothesis, RootedLinearHypothesis};
use crate::itemset::ItemSet;
use crate::learners::fit_rooted_linear;
use crate::linsep::{Label, LabeledPoint};
use crate::query_learners::{item_based_hypothesis, ClassTag};
use crate::valuation::{SetFunction, Valuation};

/// A buyer with a hidden integral valuation bounded by `H`.
pub struct AgentOracle<'a> {
    target: &'a Valuation,
    h: u64,
    queries: AtomicUsize,
}

fn integral(x: f64) -> bool {
    x.fract() == 0.0
}

/// Sufficient check on the representation: integer weights give integer
/// values under sums, maxima and matchings.
fn has_integral_values(v: &Valuation) -> bool {
    match v {
        Valuation::Linear(x) => x.weights().iter().all(|&w| integral(w)),
        Valuation::UnitDemand(x) => x.weights().iter().all(|&w| integral(w)),
        Valuation::Xos(x) => x.trees().iter().all(|t| t.iter().all(|(_, w)| integral(w))),
        Valuation::Oxs(x) => x.trees().iter().all(|t| t.iter().all(|(_, w)| integral(w))),
        Valuation::Budgeted(_) | Valuation::Goemans(_) => true,
        Valuation::Table(x) => x.table().values().iter().all(|&w| integral(w)),
    }
}

impl<'a> AgentOracle<'a> {
    pub fn new(target: &'a Valuation, h: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::field("H", "must be at least 1"));
        }
        if !has_integral_values(target) {
            return Err(Error::field("target", "valuation must take integer values"));
        }
        let top = target.value_of(&ItemSet::full(target.ground_size()));
        if top > h as f64 {
            return Err(Error::field("H", format!("f([n]) = {top} exceeds H = {h}")));
        }
        Ok(AgentOracle {
            target,
            h,
            queries: AtomicUsize::new(0),
        })
    }

    pub fn n(&self) -> usize {
        self.target.ground_size()
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Buys iff `price <= f*(S)`.
    pub fn buys(&self, s: &ItemSet, price: f64) -> Result<bool> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let v = self.target.eval(s)?;
        Ok(price <= v + 1e-9 * v.max(1.0))
    }

    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Prices `(1 + eta/3)^i` for `i = 0..=N+1`, `N = floor(log_{1+eta/3} H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceGrid {
    pub eta: f64,
    pub h: u64,
    pub prices: Vec<f64>,
}

impl PriceGrid {
    pub fn ratio(&self) -> f64 {
        1.0 + self.eta / 3.0
    }

    /// `N`, so the grid has `N + 2` prices.
    pub fn top_exponent(&self) -> usize {
        self.prices.len() - 2
    }
}

pub fn price_grid(h: u64, eta: f64) -> Result<PriceGrid> {
    if h == 0 {
        return Err(Error::field("H", "must be at least 1"));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::field(
            "eta",
            format!("must lie in (0, 1], got {eta}"),
        ));
    }
    let ratio = 1.0 + eta / 3.0;
    let hf = h as f64;
    let slack = 1e-12 * hf;
    let mut top = (hf.ln() / ratio.ln()).floor().max(0.0) as i32;
    while ratio.powi(top + 1) <= hf + slack {
        top += 1;
    }
    while top > 0 && ratio.powi(top) > hf + slack {
        top -= 1;
    }
    let prices = (0..=top + 1).map(|i| ratio.powi(i)).collect();
    Ok(PriceGrid { eta, h, prices })
}

/// Buy: `(chi(S), q^p, +1)`; no-buy: `(chi(S), approx_beta q^p, -1)`.
pub fn quote_and_label(
    features: Vec<f64>,
    price: f64,
    bought: bool,
    approx_beta: f64,
    p: f64,
) -> LabeledPoint {
    let qp = price.powf(p);
    if bought {
        LabeledPoint {
            features,
            last: qp,
            label: Label::Pos,
        }
    } else {
        LabeledPoint {
            features,
            last: approx_beta * qp,
            label: Label::Neg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub round: usize,
    pub set: ItemSet,
    pub price: f64,
    pub bought: bool,
    /// The price came from the grid and the answer was shown to the learner.
    pub explore: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceParams {
    pub approx_beta: f64,
    pub p: f64,
    pub eta: f64,
    pub m: usize,
}

impl PriceParams {
    fn validate(&self) -> Result<()> {
        if !(self.approx_beta >= 1.0 && self.approx_beta.is_finite()) {
            return Err(Error::field("approx_beta", "must be at least 1"));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::field("p", "must be positive"));
        }
        Ok(())
    }
}

/// `ceil(4 (n log2 H / (eta eps)) ln(n log2 H / (eta eps delta)))`, at least 1.
pub fn default_price_sample_size(n: usize, h: u64, eta: f64, eps: f64, delta: f64) -> usize {
    let base = n as f64 * (h.max(2) as f64).log2() / (eta * eps);
    (4.0 * base * (base / delta).ln()).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRun {
    pub hypothesis: RootedLinearHypothesis,
    pub log: Vec<Decision>,
    pub grid: PriceGrid,
    /// Rounds whose answer was fed to the learner.
    pub explored: usize,
    /// Sets marked zero by a refusal at price 1.
    pub zero_sets: usize,
}

/// Posts a uniformly random grid price on each of `m` sampled sets and fits a
/// consistent separator to the answers. The hypothesis is
/// `(1/(1+eta/3)) (w.chi(S) / (approx_beta z))^(1/p)`.
pub fn pmac_with_prices<G: Rng + ?Sized>(
    agent: &AgentOracle<'_>,
    sampler: &Distribution,
    params: &PriceParams,
    rng: &mut G,
) -> Result<PriceRun> {
    mixed_pricing(agent, sampler, &|_: &ItemSet| 0.0, 1.0, params, rng)
}

/// Quotes `base_pricer(S)` with probability `1 - explore_prob` and a uniform
/// grid price otherwise; only grid rounds reach the learner. With
/// `explore_prob = 1` no coin is drawn and the run equals
/// [`pmac_with_prices`].
pub fn mixed_pricing<G: Rng + ?Sized>(
    agent: &AgentOracle<'_>,
    sampler: &Distribution,
    base_pricer: &dyn Fn(&ItemSet) -> f64,
    explore_prob: f64,
    params: &PriceParams,
    rng: &mut G,
) -> Result<PriceRun> {
    if !(explore_prob > 0.0 && explore_prob <= 1.0) {
        return Err(Error::field("explore_prob", "must lie in (0, 1]"));
    }
    params.validate()?;
    let n = agent.n();
    if sampler.validate()? != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sampler.validate()?,
        });
    }
    let grid = price_grid(agent.h(), params.eta)?;
    let features = FeatureMap::raw(n);
    let mut log = Vec::with_capacity(params.m);
    let mut points = Vec::new();
    let mut u0 = ItemSet::empty(n);
    let mut zero_sets = 0;
    for round in 0..params.m {
        let set = sampler.sample(rng);
        let explore = explore_prob >= 1.0 || rng.gen::<f64>() < explore_prob;
        let price = if explore {
            grid.prices[rng.gen_range(0..grid.prices.len())]
        } else {
            base_pricer(&set)
        };
        let bought = agent.buys(&set, price)?;
        if explore {
            if !bought && price == 1.0 {
                // integral values below 1 are 0
                u0 = u0.union(&set);
                zero_sets += 1;
            } else {
                points.push(quote_and_label(
                    features.expand(&set),
                    price,
                    bought,
                    params.approx_beta,
                    params.p,
                ));
            }
        }
        log.push(Decision {
            round,
            set,
            price,
            bought,
            explore,
        });
    }
    let explored = log.iter().filter(|d| d.explore).count();
    let hypothesis = fit_rooted_linear(
        features,
        points,
        u0,
        params.approx_beta,
        params.p,
        1.0 / grid.ratio(),
        params.approx_beta,
    )?;
    Ok(PriceRun {
        hypothesis,
        log,
        grid,
        explored,
        zero_sets,
    })
}

/// Posts `1, 2, 4, ..., H` on `{i}` until a refusal; returns the last
/// accepted price, or 0. For integral values `v <= f*({i}) < 2v` when `v >= 1`.
pub fn probe_item_value(agent: &AgentOracle<'_>, item: usize, h: u64) -> Result<u64> {
    if !h.is_power_of_two() {
        return Err(Error::field("H", format!("{h} is not a power of two")));
    }
    let n = agent.n();
    let single = ItemSet::from_indices(n, [item])?;
    let mut accepted = 0;
    let mut price = 1u64;
    while price <= h {
        if !agent.buys(&single, price as f64)? {
            break;
        }
        accepted = price;
        price *= 2;
    }
    Ok(accepted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqPriceRun {
    pub hypothesis: Hypothesis,
    pub item_estimates: Vec<u64>,
    pub queries: usize,
}

/// Probes every item and builds the class's item-based hypothesis from the
/// estimates; factor `2R` under the class assumption.
pub fn vq_with_prices(
    agent: &AgentOracle<'_>,
    tag: ClassTag,
    r: f64,
    h: u64,
) -> Result<VqPriceRun> {
    let before = agent.queries();
    let est = (0..agent.n())
        .map(|i| probe_item_value(agent, i, h))
        .collect::<Result<Vec<u64>>>()?;
    let hypothesis = item_based_hypothesis(tag, est.iter().map(|&v| v as f64).collect(), r)?;
    Ok(VqPriceRun {
        hypothesis,
        item_estimates: est,
        queries: agent.queries() - before,
    })
}
