//! Benchmark fixtures shared by the criterion targets.

use valuelearn::distribution::Distribution;
use valuelearn::harness::{rng_stream, streams};
use valuelearn::instances::{gen_random, RandomClass, RandomParams};
use valuelearn::{ItemSet, Sample, SetFunction, Valuation};

/// A random valuation with `trees` trees over `n` items.
pub fn random_valuation(class: RandomClass, n: usize, trees: usize, seed: u64) -> Valuation {
    let params = RandomParams {
        min_trees: trees,
        max_trees: trees,
        ..RandomParams::default()
    };
    gen_random(class, n, &params, seed).expect("valid parameters")
}

/// `m` uniform sets labelled by `target`.
pub fn labelled_samples(target: &dyn SetFunction, m: usize, seed: u64) -> Vec<Sample> {
    let n = target.ground_size();
    Distribution::product(n, 0.5)
        .sample_many(m, &mut rng_stream(seed, streams::TRAIN))
        .into_iter()
        .map(|s: ItemSet| {
            let value = target.value_of(&s);
            Sample { set: s, value }
        })
        .collect()
}
