use proptest::prelude::*;
use valuelearn::distribution::Distribution;
use valuelearn::harness::{empirical_factor, rng_stream};
use valuelearn::instances::{gen_intersection_family, gen_random, RandomClass, RandomParams};
use valuelearn::itemset::all_subsets;
use valuelearn::learners::pmac_xos;
use valuelearn::linsep::{
    solve_consistent_separator, solve_separator_with, Formulation, Label, LabeledPoint,
    SeparatorOutcome, SeparatorProblem,
};
use valuelearn::oracles::{
    check_gs_triples, check_monotone, check_subadditive, check_submodular, Verdict,
};
use valuelearn::price_learning::price_grid;
use valuelearn::query_learners::{vq_learn_item_based, ClassTag, ValueOracle};
use valuelearn::valuation::{eval_oxs_bruteforce, oxs_to_xos};
use valuelearn::{Hypothesis, ItemSet, Sample, SetFunction, Valuation};

const CLASSES: [RandomClass; 6] = [
    RandomClass::Linear,
    RandomClass::UnitDemand,
    RandomClass::Xos,
    RandomClass::Oxs,
    RandomClass::Budgeted,
    RandomClass::Goemans,
];

fn class() -> impl Strategy<Value = RandomClass> {
    prop::sample::select(CLASSES.to_vec())
}

fn random(class: RandomClass, n: usize, seed: u64) -> Valuation {
    let params = RandomParams {
        max_trees: 4,
        ..RandomParams::default()
    };
    gen_random(class, n, &params, seed).unwrap()
}

fn oxs(v: Valuation) -> valuelearn::valuation::Oxs {
    match v {
        Valuation::Oxs(o) => o,
        other => panic!("expected oxs, got {}", other.kind()),
    }
}

fn assert_same_values(a: &dyn SetFunction, b: &dyn SetFunction) -> Result<(), TestCaseError> {
    for s in all_subsets(a.ground_size()) {
        let (x, y) = (a.eval(&s).unwrap(), b.eval(&s).unwrap());
        prop_assert!((x - y).abs() <= 1e-9, "{:?}: {} vs {}", s.to_vec(), x, y);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuations_are_monotone_and_vanish_on_empty(class in class(), n in 1usize..=7, seed: u64) {
        let v = random(class, n, seed);
        prop_assert_eq!(v.eval(&ItemSet::empty(n)).unwrap(), 0.0);
        prop_assert!(check_monotone(&v).unwrap().passed());
    }

    #[test]
    fn oxs_matching_equals_bruteforce(n in 1usize..=7, seed: u64) {
        let v = oxs(random(RandomClass::Oxs, n, seed));
        for s in all_subsets(n) {
            let fast = v.eval(&s).unwrap();
            let slow = eval_oxs_bruteforce(&v, &s).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-9);
        }
    }

    #[test]
    fn scaling_scales_values(class in class(), n in 1usize..=6, seed: u64, c in 0.0f64..10.0) {
        let v = random(class, n, seed);
        let Ok(scaled) = v.scaled(c) else {
            prop_assert!(matches!(class, RandomClass::Budgeted | RandomClass::Goemans));
            return Ok(());
        };
        for s in all_subsets(n) {
            let want = c * v.eval(&s).unwrap();
            prop_assert!((scaled.eval(&s).unwrap() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn oxs_to_xos_preserves_values(n in 1usize..=6, seed: u64) {
        let v = oxs(random(RandomClass::Oxs, n, seed));
        let x = oxs_to_xos(&v).unwrap();
        assert_same_values(&v, &x)?;
    }

    #[test]
    fn oxs_sits_inside_gross_substitutes(n in 1usize..=6, seed: u64) {
        let v = random(RandomClass::Oxs, n, seed);
        prop_assert!(check_gs_triples(&v).unwrap().passed());
        prop_assert!(check_submodular(&v).unwrap().passed());
        prop_assert!(check_subadditive(&v).unwrap().passed());
    }

    #[test]
    fn xos_is_subadditive(n in 1usize..=6, seed: u64) {
        let v = random(RandomClass::Xos, n, seed);
        prop_assert!(check_subadditive(&v).unwrap().passed());
    }

    #[test]
    fn violation_witnesses_reproduce(n in 3usize..=6, seed: u64) {
        let v = random(RandomClass::Xos, n, seed);
        for verdict in [check_submodular(&v).unwrap(), check_gs_triples(&v).unwrap()] {
            if let Verdict::Fail(w) = verdict {
                prop_assert!(w.reproduce(&v).unwrap());
            }
        }
    }

    #[test]
    fn valuation_json_roundtrips(class in class(), n in 1usize..=8, seed: u64) {
        let v = random(class, n, seed);
        prop_assert_eq!(Valuation::from_json(&v.to_json()).unwrap(), v);
    }

    #[test]
    fn separator_separates_realizable_points(
        dim in 1usize..=6,
        hidden in prop::collection::vec(0.0f64..5.0, 6),
        raw in prop::collection::vec((prop::collection::vec(0.0f64..1.0, 6), 0.0f64..10.0), 1..60),
    ) {
        // Points labeled by (hidden, -1) with a gap around the boundary.
        let points: Vec<LabeledPoint> = raw
            .iter()
            .filter_map(|(x, last)| {
                let features = x[..dim].to_vec();
                let score: f64 = features.iter().zip(&hidden).map(|(a, b)| a * b).sum::<f64>() - last;
                (score.abs() > 0.1).then_some(LabeledPoint {
                    features,
                    last: *last,
                    label: if score > 0.0 { Label::Pos } else { Label::Neg },
                })
            })
            .collect();
        let prob = SeparatorProblem::new(dim, points, []).unwrap();
        let first = solve_consistent_separator(&prob).unwrap();
        prop_assert_eq!(&solve_consistent_separator(&prob).unwrap(), &first);
        for form in [Formulation::Primal, Formulation::Dual] {
            let SeparatorOutcome::Feasible(sol) = solve_separator_with(&prob, form).unwrap() else {
                return Err(TestCaseError::fail("realizable points reported infeasible"));
            };
            for p in prob.points() {
                prop_assert!(sol.margin(p) >= 1.0 - 1e-7);
            }
        }
    }

    #[test]
    fn xos_hypothesis_is_monotone_zero_on_null_cube_and_deterministic(n in 2usize..=6, seed: u64) {
        let target = random(RandomClass::Xos, n, seed);
        let dist = Distribution::product(n, 0.3);
        let sets = dist.sample_many(40, &mut rng_stream(seed, 1));
        let samples: Vec<Sample> = sets
            .into_iter()
            .map(|s| {
                let value = target.eval(&s).unwrap();
                Sample::new(s, value).unwrap()
            })
            .collect();
        let h = pmac_xos(n, &samples, 0.1, &mut rng_stream(seed, 2)).unwrap();
        let again = pmac_xos(n, &samples, 0.1, &mut rng_stream(seed, 2)).unwrap();
        prop_assert_eq!(&h, &again);
        prop_assert!(check_monotone(&h).unwrap().passed());
        for s in all_subsets(n).filter(|s| s.is_subset(&h.u0)) {
            prop_assert_eq!(h.eval(&s).unwrap(), 0.0);
        }
        let hyp = Hypothesis::from(h);
        prop_assert_eq!(Hypothesis::from_json(&hyp.to_json()).unwrap(), hyp);
    }

    #[test]
    fn price_grid_is_geometric_and_covers_h(h in 1u64..=5000, eta in 0.01f64..=1.0) {
        let grid = price_grid(h, eta).unwrap();
        let ratio = 1.0 + eta / 3.0;
        prop_assert_eq!(grid.prices[0], 1.0);
        prop_assert!(*grid.prices.last().unwrap() >= h as f64);
        prop_assert!(grid.prices[grid.prices.len() - 2] <= h as f64 * (1.0 + 1e-12));
        for pair in grid.prices.windows(2) {
            prop_assert!((pair[1] / pair[0] - ratio).abs() <= 1e-12);
        }
    }

    #[test]
    fn empirical_factor_nonincreasing_in_eps(
        n in 2usize..=8,
        seed: u64,
        e1 in 0.01f64..0.5,
        e2 in 0.01f64..0.5,
    ) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let target = random(RandomClass::Xos, n, seed);
        let hyp = random(RandomClass::Linear, n, seed ^ 1);
        let dist = Distribution::product(n, 0.5);
        let a = empirical_factor(&hyp, &target, &dist, lo, 200, seed).unwrap();
        let b = empirical_factor(&hyp, &target, &dist, hi, 200, seed).unwrap();
        prop_assert!(a.alpha_hat >= b.alpha_hat);
    }

    #[test]
    fn value_query_learners_ask_only_singletons(class in class(), n in 1usize..=8, seed: u64, tag in prop::sample::select(ClassTag::ALL.to_vec())) {
        let v = random(class, n, seed);
        let oracle = ValueOracle::new(&v);
        let h = vq_learn_item_based(&oracle, tag, 2.0).unwrap();
        prop_assert_eq!(oracle.queries(), n);
        prop_assert!(check_monotone(&h).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn intersection_family_audit_holds(k in 2usize..=16, seed: u64) {
        let fam = gen_intersection_family(4096, k, seed).unwrap();
        prop_assert_eq!(fam.sets.len(), k);
        prop_assert!(fam.verify());
        let bound = fam.audit.intersection_bound;
        for (i, a) in fam.sets.iter().enumerate() {
            prop_assert!((32..=128).contains(&a.len()));
            for b in &fam.sets[i + 1..] {
                prop_assert!(a.intersection_len(b) <= bound);
            }
        }
    }
}
