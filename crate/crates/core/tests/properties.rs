mod common;

use choquet_roof::choquet::{check_dominates, mass_on, order_necessary_test, OrderStatus};
use choquet_roof::functionals::{
    approx_char_fn, entropy, ky_fan, truncated_entropy, truncated_entropy_of_spectrum, CharFnCase, LogBase, QuarticExpectation,
    ReducedEntropy,
};
use choquet_roof::linalg::{partial_trace, CMatrix, HermitianMatrix, Side};
use choquet_roof::oracles::{brute_force_roof, wootters_eof};
use choquet_roof::roof::{concave_hull, convex_roof, random_isometry, RoofOptions};
use choquet_roof::states::{
    ensemble_distance, random_ensemble, random_hermitian, random_pure, random_state, refine_to_pure, rng_from_seed,
    sample_state, steer_barycenter, DensityMatrix, Ensemble, PureEnsemble,
};
use common::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn refinement_preserves_barycenter(seed in any::<u64>(), d in 1usize..=4, atoms in 1usize..=5) {
        let e = random_ensemble(d, atoms, &mut rng_from_seed(seed)).unwrap();
        let r = refine_to_pure(&e);
        prop_assert!(r.barycenter().matrix().max_abs_diff(e.barycenter().matrix()) < 1e-10);
        prop_assert!(r.atoms().iter().all(|a| a.is_pure()));
    }

    #[test]
    fn steering_hits_target_and_shrinks(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let e = random_ensemble(d, 3, &mut rng).unwrap();
        prop_assume!(*e.barycenter().eigenvalues().last().unwrap() > 1e-6);
        let rho1 = random_state(d, d, &mut rng).unwrap();
        let rho0 = e.barycenter();
        let mut last = f64::INFINITY;
        for t in [0.1, 0.01, 0.001] {
            let target = rho0.mix(&rho1, t).unwrap();
            let s = steer_barycenter(&e, &target).unwrap();
            prop_assert!(s.ensemble.barycenter().matrix().max_abs_diff(target.matrix()) < 1e-9);
            let dist = ensemble_distance(&s.ensemble, &e).unwrap();
            prop_assert!(dist <= last + 1e-12);
            last = dist;
        }
    }

    #[test]
    fn approximators_are_monotone(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(3, rng.random_range(1..=3), &mut rng).unwrap();
        let cases = [
            CharFnCase::rank_at_most(2).unwrap(),
            CharFnCase::pure_set(vec![random_pure(3, &mut rng), random_pure(3, &mut rng)]).unwrap(),
            CharFnCase::face(support_projector(&random_state(3, 2, &mut rng).unwrap())).unwrap(),
        ];
        for case in &cases {
            let mut prev = f64::INFINITY;
            for n in 1..=50 {
                let v = approx_char_fn(case, n, &rho).unwrap();
                prop_assert!(v <= prev + 1e-12);
                prop_assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn truncated_entropy_bounds(seed in any::<u64>(), db in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(2 * db, rng.random_range(1..=2 * db), &mut rng).unwrap().with_dims((2, db)).unwrap();
        let red = partial_trace(rho.hermitian(), (2, db), Side::A).unwrap();
        let red = DensityMatrix::new(red).unwrap();
        let full = entropy(&red, LogBase::Two);
        let mut prev = 0.0;
        for n in 1..=4 {
            let h = truncated_entropy(&rho, n, LogBase::Two).unwrap();
            prop_assert!(h >= -1e-12 && h <= (n as f64).log2() + 1e-12);
            prop_assert!(prev <= h + 1e-12);
            if n >= red.rank(1e-9) {
                prop_assert!((h - full).abs() < 1e-12);
            }
            prev = h;
        }
    }
}

#[test]
fn truncated_entropy_spectrum_cases() {
    let eigs = [0.5, 0.3, 0.2];
    let expected = -(0.5f64 * 0.5f64.log2() + 0.3 * 0.3f64.log2()) + 0.8 * 0.8f64.log2();
    assert!((truncated_entropy_of_spectrum(&eigs, 2, LogBase::Two) - expected).abs() < 1e-12);
    assert!((truncated_entropy_of_spectrum(&eigs, 2, LogBase::Two) - 0.763547202).abs() < 1e-9);
}

#[test]
fn ky_fan_dominates_sampled_projectors() {
    let mut rng = rng_from_seed(21);
    let rho = random_state(4, 4, &mut rng).unwrap();
    for n in 1..=3 {
        let best = ky_fan(&rho, n).unwrap();
        for _ in 0..500 {
            let v = random_isometry(4, n, &mut rng);
            let p = v.matmul(&v.adjoint());
            let val = HermitianMatrix::new(p.hermitian_part()).unwrap().trace_product(rho.matrix());
            assert!(val <= best + 1e-12);
        }
    }
}

#[test]
fn dominance_implies_necessary_test_passes() {
    let mut rng = rng_from_seed(22);
    for k in 0..200 {
        let d = rng.random_range(2..=3);
        let nu = random_ensemble(d, rng.random_range(1..=3), &mut rng).unwrap();
        let mu = if k % 2 == 0 { refine_to_pure(&nu).into_ensemble() } else { split_atoms(&nu, &mut rng) };
        let verdict = check_dominates(&mu, &nu).unwrap();
        assert!(verdict.dominates());
        assert!(order_necessary_test(&mu, &nu, 200, k).unwrap().is_consistent());
    }
}

#[test]
fn pure_supported_measures_are_maximal() {
    let mut rng = rng_from_seed(23);
    for _ in 0..100 {
        let d = rng.random_range(2..=3);
        let nu = refine_to_pure(&random_ensemble(d, 2, &mut rng).unwrap());
        // Reordered copy of nu: dominates and coincides with it.
        let mut order: Vec<usize> = (0..nu.len()).collect();
        order.reverse();
        let mu = Ensemble::new(order.iter().map(|&i| nu.weights()[i]).collect(), order.iter().map(|&i| nu.atoms()[i].clone()).collect())
            .unwrap();
        let verdict = check_dominates(&mu, &nu).unwrap();
        assert!(verdict.dominates());
        assert!(ensemble_distance(&mu, &nu).unwrap() <= 1e-6);
        // A different pure decomposition of the same barycenter does not dominate.
        let rho = nu.barycenter();
        let other = choquet_roof::roof::decomposition_from_isometry(&rho, &random_isometry(rho.rank(1e-9) + 1, rho.rank(1e-9), &mut rng)).unwrap();
        let verdict = check_dominates(other.ensemble(), &nu).unwrap();
        if verdict.dominates() {
            assert!(ensemble_distance(other.ensemble(), &nu).unwrap() <= 1e-6);
        }
    }
}

#[test]
fn dominance_implies_mass_monotonicity() {
    let mut rng = rng_from_seed(24);
    for _ in 0..60 {
        let d = rng.random_range(2..=4);
        let nu = random_ensemble(d, rng.random_range(1..=3), &mut rng).unwrap();
        let mu = split_atoms(&nu, &mut rng);
        assert!(check_dominates(&mu, &nu).unwrap().dominates());
        for p in mass_predicates(&nu, &mut rng) {
            assert!(mass_on(&mu, &p).unwrap() >= mass_on(&nu, &p).unwrap() - 1e-7, "{p:?}");
        }
    }
}

#[test]
fn wootters_local_unitary_invariance() {
    let mut rng = rng_from_seed(25);
    for _ in 0..100 {
        let rho = random_state(4, rng.random_range(1..=4), &mut rng).unwrap().with_dims((2, 2)).unwrap();
        let u = random_unitary(2, &mut rng).kron(&random_unitary(2, &mut rng));
        let a = wootters_eof(&rho, LogBase::Two).unwrap();
        let b = wootters_eof(&conjugate(&rho, &u), LogBase::Two).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn roof_never_exceeds_grid_oracle() {
    let mut rng = rng_from_seed(26);
    for _ in 0..5 {
        let a = random_hermitian(2, &mut rng);
        let rho = random_state(2, 2, &mut rng).unwrap();
        let f = QuarticExpectation { a };
        let grid = brute_force_roof(&f, &rho, 2, 100).unwrap().value;
        let roof = convex_roof(&f, &rho, &RoofOptions { restarts: 2, ..RoofOptions::default() }).unwrap().value;
        assert!(roof <= grid + 1e-9);
    }
}

#[test]
fn restarts_bound_direction() {
    let rho = sample_state(4, 4, 31).unwrap().with_dims((2, 2)).unwrap();
    let f = ReducedEntropy { dims: (2, 2), base: LogBase::Two };
    let mut prev = f64::INFINITY;
    for restarts in [1, 2, 4] {
        let v = convex_roof(&f, &rho, &RoofOptions { restarts, seed: 5, ..RoofOptions::default() }).unwrap().value;
        assert!(v <= prev);
        prev = v;
    }
    let f = choquet_roof::functionals::PurityGap;
    let q = sample_state(2, 2, 32).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for restarts in [1, 2, 4] {
        let v = concave_hull(&f, &q, &RoofOptions { restarts, seed: 5, ..RoofOptions::default() }).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn roof_results_independent_of_thread_count() {
    let rho = sample_state(4, 4, 33).unwrap().with_dims((2, 2)).unwrap();
    let opts = RoofOptions { restarts: 4, seed: 9, ..RoofOptions::default() };
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| choquet_roof::roof::eof(&rho, &opts, LogBase::Two).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.best_per_restart, b.best_per_restart);
}

#[test]
fn optimal_roof_ensemble_dominates_point_mass() {
    for seed in 0..5 {
        let rho = sample_state(4, 3, 40 + seed).unwrap().with_dims((2, 2)).unwrap();
        let r = choquet_roof::roof::eof(&rho, &RoofOptions { restarts: 2, ..RoofOptions::default() }, LogBase::Two).unwrap();
        let pure = PureEnsemble::new(r.ensemble.clone()).unwrap();
        let verdict = check_dominates(pure.ensemble(), &Ensemble::point_mass(rho.clone())).unwrap();
        assert_eq!(verdict.status, OrderStatus::Dominates);
    }
}

#[test]
fn decomposition_points_reconstruct() {
    let mut rng = rng_from_seed(41);
    for _ in 0..20 {
        let rho = random_state(3, rng.random_range(1..=3), &mut rng).unwrap();
        let r = rho.rank(1e-9);
        let v = random_isometry(r + rng.random_range(0..3), r, &mut rng);
        let e = choquet_roof::roof::decomposition_from_isometry(&rho, &v).unwrap();
        assert!(e.barycenter().matrix().max_abs_diff(rho.matrix()) < 1e-9);
        let gram = v.adjoint().matmul(&v);
        assert!(gram.max_abs_diff(&CMatrix::identity(r)) < 1e-9);
    }
}
