use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relimp::binary::{birnbaum, covariance_importance, information_importance};
use relimp::entropy::entropy;
use relimp::generate::{random_coherent, random_system};
use relimp::reliability::{pivots, reliability};
use relimp::structure::{mask_of, Expr};
use relimp::{ProbabilityVector, StructureFunction};

/// A random coherent system on 1..=n from a seed.
fn system(seed: u64, n: usize) -> StructureFunction {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn probs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

/// Size, seed and a matching probability vector.
fn case(max_n: usize) -> impl Strategy<Value = (usize, u64, Vec<f64>)> {
    (1..=max_n, any::<u64>()).prop_flat_map(|(n, seed)| (Just(n), Just(seed), probs(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expression_round_trip(seed in any::<u64>(), n in 1usize..=10) {
        let sf = random_coherent(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let expr = sf.expr().unwrap();
        for s in 0..sf.num_states() as u32 {
            prop_assert_eq!(expr.eval(s), sf.eval(s));
        }
        let reparsed = StructureFunction::from_expr(Expr::parse(&expr.to_string()).unwrap()).unwrap();
        prop_assert!(reparsed.same_table(&sf));
    }

    #[test]
    fn multilinear_identity((n, seed, _p) in case(12)) {
        let sf = system(seed, n);
        let b = sf.signed_domination();
        for r in 0..sf.num_states() as u32 {
            prop_assert_eq!(b.zeta_at(r), i64::from(sf.eval(r)));
        }
    }

    #[test]
    fn path_cut_duality((n, seed, _p) in case(10)) {
        let sf = system(seed, n);
        let sets = sf.minimal_path_cut_sets().unwrap();
        let dual = sf.dual().minimal_path_cut_sets().unwrap();
        prop_assert_eq!(&sets.cuts, &dual.paths);
        prop_assert_eq!(&sets.paths, &dual.cuts);
        for s in 0..sf.num_states() as u32 {
            prop_assert_eq!(sets.eval_paths(s), sf.eval(s));
            prop_assert_eq!(sets.eval_cuts(s), sf.eval(s));
        }
        // minimality: no member contains another
        for family in [&sets.paths, &sets.cuts] {
            for (a, &x) in family.iter().enumerate() {
                for (b, &y) in family.iter().enumerate() {
                    prop_assert!(a == b || x & !y != 0);
                }
            }
        }
    }

    #[test]
    fn series_parallel_composition_is_coherent(seed in any::<u64>(), n in 2usize..=9) {
        let sf = random_coherent(&mut ChaCha8Rng::seed_from_u64(seed), n);
        prop_assert!(sf.is_coherent());
        prop_assert!(sf.dual().is_coherent());
        prop_assert!(sf.dual().dual().same_table(&sf));
    }

    #[test]
    fn pivotal_identity((n, seed, p) in case(12)) {
        let sf = system(seed, n);
        let p = ProbabilityVector::new(p).unwrap();
        for (k, pv) in pivots(&sf, &p).unwrap().iter().enumerate() {
            let pi = p.as_slice()[k];
            prop_assert!((pv.h - (pi * pv.up + (1.0 - pi) * pv.down)).abs() < 1e-12);
        }
    }

    #[test]
    fn reliability_is_affine_in_each_coordinate((n, seed, p) in case(10), which in 0usize..10) {
        let sf = system(seed, n);
        let k = which % n + 1;
        let p = ProbabilityVector::new(p).unwrap();
        let at = |t: f64| reliability(&sf, &p.with(k, t).unwrap()).unwrap();
        prop_assert!((at(0.5) - 0.5 * (at(0.0) + at(1.0))).abs() < 1e-12);
    }

    #[test]
    fn reliability_is_monotone((n, seed, p) in case(10), which in 0usize..10, bump in 0.0f64..=1.0) {
        let sf = system(seed, n);
        let k = which % n + 1;
        let p = ProbabilityVector::new(p).unwrap();
        let lo = p.get(k);
        let hi = lo + (1.0 - lo) * bump;
        let h_lo = reliability(&sf, &p).unwrap();
        let h_hi = reliability(&sf, &p.with(k, hi).unwrap()).unwrap();
        prop_assert!(h_hi >= h_lo - 1e-15);
    }

    #[test]
    fn dual_reliability((n, seed, p) in case(12)) {
        let sf = system(seed, n);
        let p = ProbabilityVector::new(p).unwrap();
        let h = reliability(&sf, &p.complement()).unwrap();
        let hd = reliability(&sf.dual(), &p).unwrap();
        prop_assert!((hd - (1.0 - h)).abs() < 1e-12);
    }

    #[test]
    fn dual_measures((n, seed, p) in case(12)) {
        let sf = system(seed, n);
        let p = ProbabilityVector::new(p).unwrap();
        let q = p.complement();
        let (c, cd) = (covariance_importance(&sf, &p).unwrap(), covariance_importance(&sf.dual(), &q).unwrap());
        let (m, md) = (information_importance(&sf, &p).unwrap(), information_importance(&sf.dual(), &q).unwrap());
        for k in 0..n {
            prop_assert!((c.values[k] - cd.values[k]).abs() < 1e-12);
            prop_assert!((m.values[k] - md.values[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn birnbaum_ignores_own_reliability((n, seed, p) in case(12), which in 0usize..12, new in 0.0f64..=1.0) {
        let sf = system(seed, n);
        let k = which % n + 1;
        let p = ProbabilityVector::new(p).unwrap();
        let before = birnbaum(&sf, &p).unwrap().value(k);
        let after = birnbaum(&sf, &p.with(k, new).unwrap()).unwrap().value(k);
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn ranking_is_sorted((n, seed, p) in case(10)) {
        let sf = system(seed, n);
        let p = ProbabilityVector::new(p).unwrap();
        let r = covariance_importance(&sf, &p).unwrap();
        let mut ids: Vec<usize> = r.ranking.clone();
        ids.sort_unstable();
        prop_assert_eq!(ids, (1..=n).collect::<Vec<_>>());
        for w in r.ranking.windows(2) {
            prop_assert!(r.value(w[0]) >= r.value(w[1]) - 1e-12);
        }
    }

    #[test]
    fn mask_round_trip(ids in prop::collection::btree_set(1usize..=24, 0..24)) {
        let ids: Vec<usize> = ids.into_iter().collect();
        prop_assert_eq!(relimp::structure::state_members(mask_of(&ids)), ids);
    }
}

/// H(αp)/p is nonincreasing in p on (0, 1].
#[test]
fn entropy_ratio_is_nonincreasing() {
    for a in 1..=10 {
        let alpha = f64::from(a) / 10.0;
        let ratio = |p: f64| entropy(alpha * p).unwrap() / p;
        let grid: Vec<f64> = (1..=4000).map(|k| f64::from(k) / 4000.0).collect();
        for w in grid.windows(2) {
            assert!(ratio(w[1]) <= ratio(w[0]) + 1e-12, "alpha {alpha}, p {}", w[1]);
        }
    }
}
