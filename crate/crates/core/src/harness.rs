//! Experiment drivers: empirical PMAC factors, multi-seed runs, and the
//! intersection-family demonstration.

use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::instances::{
    build_fb, gen_intersection_family, gen_random_with, FamilyAudit, RandomClass, RandomParams,
};
use crate::learners::{
    pac_oxs_const_trees, pmac_oxs_r_leaves, pmac_subadditive, pmac_xos, pmac_xos_r_trees,
    unit_demand_learn, Sample,
};
use crate::price_learning::{pmac_with_prices, AgentOracle, PriceParams};
use crate::query_learners::{pmac_ratio, vq_learn_item_based, ClassTag, ValueOracle};
use crate::valuation::{SetFunction, Valuation};

pub use crate::ext_f64;

/// Independent RNG streams derived from one seed.
pub mod streams {
    pub const TARGET: u64 = 0;
    pub const TRAIN: u64 = 1;
    pub const COINS: u64 = 2;
    pub const TEST: u64 = 3;
    pub const SPLIT: u64 = 4;
}

pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub eps: f64,
    #[serde(rename = "M")]
    pub m_test: usize,
    /// `(1 - eps)`-quantile of the per-set ratio.
    #[serde(with = "ext_f64")]
    pub alpha_hat: f64,
    #[serde(with = "ext_f64")]
    pub median_ratio: f64,
    /// Fraction of test sets with `h > f*` or `h = 0 < f*`.
    pub violation_mass: f64,
}

/// The `(1 - eps)`-quantile of `ratios`: the sorted entry at position
/// `ceil((1 - eps) M) - 1`.
pub fn upper_quantile(ratios: &mut [f64], eps: f64) -> f64 {
    ratios.sort_by(|a, b| a.total_cmp(b));
    let m = ratios.len();
    let idx = (((1.0 - eps) * m as f64).ceil() as usize).clamp(1, m) - 1;
    ratios[idx]
}

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        let (a, b) = (xs[m / 2 - 1], xs[m / 2]);
        if a.is_infinite() || b.is_infinite() {
            b
        } else {
            (a + b) / 2.0
        }
    }
}

pub const MIN_TEST_SIZE: usize = 100;

pub fn empirical_factor(
    hyp: &dyn SetFunction,
    target: &dyn SetFunction,
    dist: &Distribution,
    eps: f64,
    m_test: usize,
    seed: u64,
) -> Result<FactorReport> {
    empirical_factor_with(
        hyp,
        target,
        dist,
        eps,
        m_test,
        &mut rng_stream(seed, streams::TEST),
    )
}

/// Draws `m_test` fresh sets and summarizes `f*/h` over them.
pub fn empirical_factor_with(
    hyp: &dyn SetFunction,
    target: &dyn SetFunction,
    dist: &Distribution,
    eps: f64,
    m_test: usize,
    rng: &mut ChaCha8Rng,
) -> Result<FactorReport> {
    if m_test < MIN_TEST_SIZE {
        return Err(Error::field(
            "M",
            format!("must be at least {MIN_TEST_SIZE}, got {m_test}"),
        ));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::field(
            "eps",
            format!("must lie in (0, 1), got {eps}"),
        ));
    }
    let n = dist.validate()?;
    for f in [hyp.ground_size(), target.ground_size()] {
        if f != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f,
            });
        }
    }
    let mut ratios: Vec<f64> = (0..m_test)
        .map(|_| {
            let s = dist.sample(rng);
            pmac_ratio(target.value_of(&s), hyp.value_of(&s))
        })
        .collect();
    let violations = ratios.iter().filter(|r| r.is_infinite()).count();
    let alpha_hat = upper_quantile(&mut ratios, eps);
    Ok(FactorReport {
        eps,
        m_test,
        alpha_hat,
        median_ratio: median(&mut ratios),
        violation_mass: violations as f64 / m_test as f64,
    })
}

/// Which learner an experiment trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum LearnerSpec {
    Xos {
        eps: f64,
    },
    Subadditive {
        eps: f64,
    },
    OxsRLeaves {
        r: f64,
        eps: f64,
    },
    XosRTrees {
        r: f64,
        eta: f64,
        eps: f64,
    },
    UnitDemand,
    OxsConstTrees {
        r: usize,
    },
    /// Buy/no-buy answers on `m` sampled sets at random grid prices.
    Prices {
        approx_beta: f64,
        p: f64,
        eta: f64,
        h: u64,
    },
    /// Value queries on singletons.
    Vq {
        tag: ClassTag,
        r: f64,
    },
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Xos { .. } => "xos",
            LearnerSpec::Subadditive { .. } => "subadditive",
            LearnerSpec::OxsRLeaves { .. } => "oxs-r-leaves",
            LearnerSpec::XosRTrees { .. } => "xos-r-trees",
            LearnerSpec::UnitDemand => "unit-demand",
            LearnerSpec::OxsConstTrees { .. } => "oxs-const-trees",
            LearnerSpec::Prices { .. } => "prices",
            LearnerSpec::Vq { .. } => "vq",
        }
    }

    /// Trains a sample-based learner. Price and query learners need oracle
    /// access and are rejected here.
    pub fn train_on_samples(
        &self,
        n: usize,
        samples: &[Sample],
        coins: &mut ChaCha8Rng,
    ) -> Result<Hypothesis> {
        Ok(match self {
            LearnerSpec::Xos { eps } => pmac_xos(n, samples, *eps, coins)?.into(),
            LearnerSpec::Subadditive { eps } => pmac_subadditive(n, samples, *eps, coins)?.into(),
            LearnerSpec::OxsRLeaves { r, eps } => {
                pmac_oxs_r_leaves(n, samples, *r, *eps, coins)?.into()
            }
            LearnerSpec::XosRTrees { r, eta, eps } => {
                pmac_xos_r_trees(n, samples, *r, *eta, *eps, coins)?.into()
            }
            LearnerSpec::UnitDemand => Hypothesis::UnitDemand(unit_demand_learn(n, samples)?),
            LearnerSpec::OxsConstTrees { r } => pac_oxs_const_trees(n, samples, *r)?.into(),
            LearnerSpec::Prices { .. } | LearnerSpec::Vq { .. } => {
                return Err(Error::field(
                    "learner",
                    format!("`{}` learns from an oracle, not samples", self.name()),
                ))
            }
        })
    }

    /// Trains with oracle access to `target`, drawing `m` sets from `train`.
    pub fn train(
        &self,
        target: &Valuation,
        train: &Distribution,
        m: usize,
        seed: u64,
    ) -> Result<Hypothesis> {
        let n = target.ground_size();
        match self {
            LearnerSpec::Prices {
                approx_beta,
                p,
                eta,
                h,
            } => {
                let agent = AgentOracle::new(target, *h)?;
                let params = PriceParams {
                    approx_beta: *approx_beta,
                    p: *p,
                    eta: *eta,
                    m,
                };
                let run = pmac_with_prices(
                    &agent,
                    train,
                    &params,
                    &mut rng_stream(seed, streams::TRAIN),
                )?;
                Ok(run.hypothesis.into())
            }
            LearnerSpec::Vq { tag, r } => vq_learn_item_based(&ValueOracle::new(target), *tag, *r),
            _ => {
                let mut rng = rng_stream(seed, streams::TRAIN);
                let samples: Vec<Sample> = train
                    .sample_many(m, &mut rng)
                    .into_iter()
                    .map(|s| {
                        let v = target.value_of(&s);
                        Sample { set: s, value: v }
                    })
                    .collect();
                self.train_on_samples(n, &samples, &mut rng_stream(seed, streams::COINS))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TargetSpec {
    Inline {
        valuation: Valuation,
    },
    /// A fresh random instance per seed.
    Random {
        class: RandomClass,
        n: usize,
        #[serde(default)]
        params: RandomParams,
    },
}

impl TargetSpec {
    pub fn n(&self) -> usize {
        match self {
            TargetSpec::Inline { valuation } => valuation.ground_size(),
            TargetSpec::Random { n, .. } => *n,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Valuation> {
        match self {
            TargetSpec::Inline { valuation } => Ok(valuation.clone()),
            TargetSpec::Random { class, n, params } => {
                gen_random_with(*class, *n, params, &mut rng_stream(seed, streams::TARGET))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub target: TargetSpec,
    pub learner: LearnerSpec,
    pub train: Distribution,
    /// Defaults to `train`.
    #[serde(default)]
    pub test: Option<Distribution>,
    pub m: usize,
    #[serde(rename = "M")]
    pub m_test: usize,
    pub eps: f64,
    pub seeds: Vec<u64>,
    /// Seeds with `alpha_hat` at most this value are counted in the summary.
    #[serde(default)]
    pub threshold: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::field("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::field("id", "must not be empty"));
        }
        if self.seeds.is_empty() {
            return Err(Error::field("seeds", "at least one seed is required"));
        }
        if self.m_test < MIN_TEST_SIZE {
            return Err(Error::field(
                "M",
                format!("must be at least {MIN_TEST_SIZE}"),
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::field("eps", "must lie in (0, 1)"));
        }
        let n = self.target.n();
        let train_n = self
            .train
            .validate()
            .map_err(|e| Error::field("train", e.to_string()))?;
        if train_n != n {
            return Err(Error::field(
                "train",
                format!("ground set {train_n} differs from target's {n}"),
            ));
        }
        if let Some(test) = &self.test {
            let test_n = test
                .validate()
                .map_err(|e| Error::field("test", e.to_string()))?;
            if test_n != n {
                return Err(Error::field(
                    "test",
                    format!("ground set {test_n} differs from target's {n}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment_id: String,
    pub seed: u64,
    pub m: usize,
    #[serde(rename = "M")]
    pub m_test: usize,
    pub eps: f64,
    #[serde(with = "ext_f64")]
    pub alpha_hat: f64,
    pub violation_mass: f64,
    pub wall_ms: u64,
    /// Learner failure, if any; the row then has `alpha_hat = inf`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub seeds: usize,
    #[serde(with = "ext_f64")]
    pub median_alpha: f64,
    #[serde(with = "ext_f64")]
    pub max_alpha: f64,
    pub failures: usize,
    #[serde(default)]
    pub within_threshold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub learner: String,
    pub rows: Vec<ExperimentRow>,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    /// The report with timings zeroed; fixed seeds reproduce this exactly.
    pub fn without_timing(&self) -> ExperimentReport {
        let mut r = self.clone();
        for row in &mut r.rows {
            row.wall_ms = 0;
        }
        r
    }
}

fn run_trial(cfg: &ExperimentConfig, seed: u64) -> ExperimentRow {
    let start = Instant::now();
    let outcome = (|| -> Result<FactorReport> {
        let target = cfg.target.build(seed)?;
        let hyp = cfg.learner.train(&target, &cfg.train, cfg.m, seed)?;
        let test = cfg.test.as_ref().unwrap_or(&cfg.train);
        empirical_factor_with(
            &hyp,
            &target,
            test,
            cfg.eps,
            cfg.m_test,
            &mut rng_stream(seed, streams::TEST),
        )
    })();
    let wall_ms = start.elapsed().as_millis() as u64;
    let (alpha_hat, violation_mass, error) = match outcome {
        Ok(r) => (r.alpha_hat, r.violation_mass, None),
        Err(e) => (f64::INFINITY, 1.0, Some(e.to_string())),
    };
    ExperimentRow {
        experiment_id: cfg.id.clone(),
        seed,
        m: cfg.m,
        m_test: cfg.m_test,
        eps: cfg.eps,
        alpha_hat,
        violation_mass,
        wall_ms,
        error,
    }
}

/// Runs every seed (in parallel) and summarizes. Learner failures are
/// recorded per row rather than aborting the experiment.
pub fn run_pmac_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let rows: Vec<ExperimentRow> = cfg.seeds.par_iter().map(|&s| run_trial(cfg, s)).collect();
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha_hat).collect();
    let max_alpha = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let summary = ExperimentSummary {
        seeds: rows.len(),
        median_alpha: median(&mut alphas),
        max_alpha,
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
        within_threshold: cfg
            .threshold
            .map(|t| rows.iter().filter(|r| r.alpha_hat <= t).count()),
    };
    Ok(ExperimentReport {
        id: cfg.id.clone(),
        learner: cfg.learner.name().to_string(),
        rows,
        summary,
    })
}

/// Optional overrides for [`adversarial_demo`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemoOptions {
    /// Indices forming `B`; default a uniform half (rounded up) of the family.
    pub b: Option<Vec<usize>>,
    /// Training draws, uniform over the family with replacement; default
    /// `ceil(k/2)`.
    pub train_draws: Option<usize>,
    /// Learner slack; default 0.1.
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub b: Vec<usize>,
    pub train_draws: usize,
    pub trained_members: usize,
    pub unseen_members: usize,
    /// Median over unseen members of `max(h/f*, f*/h)`; 1 when both vanish,
    /// infinite when exactly one does. Absent when every member was seen.
    #[serde(default)]
    pub measured_factor: Option<String>,
    #[serde(with = "ext_f64")]
    pub measured_factor_value: f64,
    /// Same statistic over the members seen in training.
    #[serde(with = "ext_f64")]
    pub seen_factor: f64,
    /// Median of `f*/h` over unseen members of `B`, and over the others.
    #[serde(with = "ext_f64")]
    pub unseen_in_b_ratio: f64,
    #[serde(with = "ext_f64")]
    pub unseen_outside_b_ratio: f64,
    /// Fraction of unseen members predicted 0.
    pub unseen_zero_fraction: f64,
    /// `sqrt(n) / (2 log2 n)`.
    pub arithmetic_floor: f64,
    /// `min_{i in B} f_B(A_i) / max_{j not in B} f_B(A_j)`.
    #[serde(with = "ext_f64")]
    pub value_gap: f64,
    pub audit: FamilyAudit,
    pub wall_ms: u64,
}

/// A uniform subset of `0..k` of size `ceil(k/2)`, sorted.
pub fn uniform_half(k: usize, seed: u64) -> Vec<usize> {
    let mut b = sample_indices(&mut rng_stream(seed, streams::SPLIT), k, k.div_ceil(2)).into_vec();
    b.sort_unstable();
    b
}

fn symmetric_error(target: f64, hyp: f64) -> f64 {
    match (target > 0.0, hyp > 0.0) {
        (false, false) => 1.0,
        (true, true) => (target / hyp).max(hyp / target),
        _ => f64::INFINITY,
    }
}

/// Builds the family, a target `f_B`, trains the XOS learner on draws from
/// the family and measures the error on members never drawn.
pub fn adversarial_demo(n: usize, k: usize, seed: u64, opts: &DemoOptions) -> Result<DemoReport> {
    if n < 1 << 12 {
        return Err(Error::field("n", format!("must be at least 4096, got {n}")));
    }
    let start = Instant::now();
    let family = gen_intersection_family(n, k, seed)?;
    let b = opts.b.clone().unwrap_or_else(|| uniform_half(k, seed));
    let target = build_fb(&family, &b)?;
    let draws = opts.train_draws.unwrap_or(k.div_ceil(2));
    let eps = opts.eps.unwrap_or(0.1);
    let mut train_rng = rng_stream(seed, streams::TRAIN);
    let picks: Vec<usize> = (0..draws)
        .map(|_| rand::Rng::gen_range(&mut train_rng, 0..k))
        .collect();
    let samples: Vec<Sample> = picks
        .iter()
        .map(|&i| Sample {
            set: family.sets[i].clone(),
            value: target.value_of(&family.sets[i]),
        })
        .collect();
    let hyp = pmac_xos(n, &samples, eps, &mut rng_stream(seed, streams::COINS))?;
    let mut seen = vec![false; k];
    for &i in &picks {
        seen[i] = true;
    }
    let in_b = {
        let mut v = vec![false; k];
        for &i in &b {
            v[i] = true;
        }
        v
    };
    let mut unseen_err = Vec::new();
    let mut seen_err = Vec::new();
    let mut ratio_b = Vec::new();
    let mut ratio_out = Vec::new();
    let mut zeros = 0;
    for i in 0..k {
        let a = &family.sets[i];
        let (f, h) = (target.value_of(a), hyp.value_of(a));
        if seen[i] {
            seen_err.push(symmetric_error(f, h));
            continue;
        }
        unseen_err.push(symmetric_error(f, h));
        if h == 0.0 {
            zeros += 1;
        }
        let r = if h > 0.0 {
            f / h
        } else if f > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        if in_b[i] {
            ratio_b.push(r);
        } else {
            ratio_out.push(r);
        }
    }
    let value = |i: usize| target.value_of(&family.sets[i]);
    let min_in = b.iter().map(|&i| value(i)).fold(f64::INFINITY, f64::min);
    let max_out = (0..k).filter(|&i| !in_b[i]).map(value).fold(0.0, f64::max);
    let value_gap = if b.is_empty() || min_in.is_infinite() {
        f64::NAN
    } else if max_out == 0.0 {
        f64::INFINITY
    } else {
        min_in / max_out
    };
    let unseen = unseen_err.len();
    let measured = median(&mut unseen_err);
    Ok(DemoReport {
        n,
        k,
        seed,
        b,
        train_draws: draws,
        trained_members: seen.iter().filter(|&&s| s).count(),
        unseen_members: unseen,
        measured_factor: (unseen > 0).then(|| ext_f64::to_text(measured)),
        measured_factor_value: measured,
        seen_factor: median(&mut seen_err),
        unseen_in_b_ratio: median(&mut ratio_b),
        unseen_outside_b_ratio: median(&mut ratio_out),
        unseen_zero_fraction: if unseen > 0 {
            zeros as f64 / unseen as f64
        } else {
            0.0
        },
        arithmetic_floor: (n as f64).sqrt() / (2.0 * (n as f64).log2()),
        value_gap,
        audit: family.audit,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Linear;

    fn lin(w: &[f64]) -> Linear {
        Linear::new(w.to_vec()).unwrap()
    }

    #[test]
    fn exact_and_halved_hypotheses() {
        let t = lin(&[1.0, 2.0, 3.0]);
        let d = Distribution::UniformSubsets { n: 3 };
        let same = empirical_factor(&t, &t, &d, 0.1, 500, 0).unwrap();
        assert_eq!((same.alpha_hat, same.violation_mass), (1.0, 0.0));
        let half = lin(&[0.5, 1.0, 1.5]);
        assert_eq!(
            empirical_factor(&half, &t, &d, 0.1, 500, 0)
                .unwrap()
                .alpha_hat,
            2.0
        );
    }

    #[test]
    fn overestimates_are_infinite() {
        // overestimates exactly when item 0 is present with item 1 absent
        let t = lin(&[1.0, 1.0, 1.0, 1.0]);
        let h = crate::valuation::SetTable::from_fn(4, |s| {
            let v = s.len() as f64;
            if s.contains(0) && !s.contains(1) {
                v + 1.0
            } else {
                v
            }
        })
        .unwrap();
        let d = Distribution::UniformSubsets { n: 4 };
        let r = empirical_factor(&h, &t, &d, 0.05, 4000, 1).unwrap();
        assert!(r.alpha_hat.is_infinite());
        assert!(
            (r.violation_mass - 0.25).abs() < 0.03,
            "{}",
            r.violation_mass
        );
    }

    #[test]
    fn quantile_is_monotone_in_eps() {
        let mut xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let mut last = f64::INFINITY;
        for eps in [0.01, 0.05, 0.1, 0.3, 0.5, 0.9] {
            let q = upper_quantile(&mut xs, eps);
            assert!(q <= last);
            last = q;
        }
        assert_eq!(upper_quantile(&mut xs, 0.1), 90.0);
    }

    #[test]
    fn small_test_sets_rejected() {
        let t = lin(&[1.0]);
        assert!(
            empirical_factor(&t, &t, &Distribution::UniformSubsets { n: 1 }, 0.1, 10, 0).is_err()
        );
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            id: "t".into(),
            target: TargetSpec::Random {
                class: RandomClass::Xos,
                n: 6,
                params: RandomParams::default(),
            },
            learner: LearnerSpec::Xos { eps: 0.1 },
            train: Distribution::product(6, 0.5),
            test: None,
            m: 200,
            m_test: 200,
            eps: 0.1,
            seeds: vec![0, 1, 2],
            threshold: Some(7f64.sqrt()),
        }
    }

    #[test]
    fn experiment_reproducible_and_roundtrips() {
        let cfg = config();
        let a = run_pmac_experiment(&cfg).unwrap();
        let b = run_pmac_experiment(&cfg).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert_eq!(a.rows.len(), 3);
        let text = serde_json::to_string(&a).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        let cfg_text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&cfg_text).unwrap(), cfg);
    }

    // This instance once made the simplex cycle on a degenerate subproblem.
    #[test]
    fn separator_instance_that_cycled_terminates() {
        let n = 20;
        let cfg = ExperimentConfig {
            target: TargetSpec::Random {
                class: RandomClass::Xos,
                n,
                params: RandomParams {
                    max_trees: 10,
                    ..RandomParams::default()
                },
            },
            train: Distribution::product(n, 0.5),
            m: 1000,
            m_test: 1000,
            seeds: vec![0],
            ..config()
        };
        let report = run_pmac_experiment(&cfg).unwrap();
        assert_eq!(report.summary.failures, 0);
        assert!(report.rows[0].alpha_hat <= ((n + 1) as f64).sqrt());
    }

    #[test]
    fn config_errors_name_fields() {
        let mut cfg = config();
        cfg.m_test = 5;
        assert!(matches!(cfg.validate(), Err(Error::InvalidField { field, .. }) if field == "M"));
        let mut cfg = config();
        cfg.train = Distribution::product(5, 0.5);
        assert!(
            matches!(cfg.validate(), Err(Error::InvalidField { field, .. }) if field == "train")
        );
        let mut cfg = config();
        cfg.seeds.clear();
        assert!(
            matches!(cfg.validate(), Err(Error::InvalidField { field, .. }) if field == "seeds")
        );
    }

    #[test]
    fn infinite_alpha_roundtrips() {
        let row = ExperimentRow {
            experiment_id: "x".into(),
            seed: 0,
            m: 1,
            m_test: 100,
            eps: 0.1,
            alpha_hat: f64::INFINITY,
            violation_mass: 1.0,
            wall_ms: 0,
            error: Some("boom".into()),
        };
        let text = serde_json::to_string(&row).unwrap();
        assert!(text.contains("\"alpha_hat\":\"inf\""));
        assert_eq!(serde_json::from_str::<ExperimentRow>(&text).unwrap(), row);
    }

    #[test]
    fn demo_small_cases() {
        let one = adversarial_demo(4096, 1, 0, &DemoOptions::default()).unwrap();
        assert_eq!(one.b, vec![0]);
        assert_eq!(one.unseen_members, 0);
        assert!(one.measured_factor.is_none());
        assert_eq!(one.trained_members, 1);
        let floor = 64.0 / 24.0;
        assert!((one.arithmetic_floor - floor).abs() < 1e-12);
        assert!(one.value_gap.is_infinite());
        let empty = adversarial_demo(
            4096,
            4,
            0,
            &DemoOptions {
                b: Some(vec![]),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(empty.measured_factor_value, 1.0);
    }
}
