use choquet_roof::linalg::{eigh, op_norm, partial_trace, trace_norm, CMatrix, HermitianMatrix, Side, C64};
use choquet_roof::states::{random_hermitian, random_state, rng_from_seed, sample_state};

/// Number of eigenvalues of `h` below `x`, from the signs of the pivots of an
/// LDL† factorization of `h - xI` (Sylvester's law of inertia).
fn count_below(h: &CMatrix, x: f64) -> usize {
    let n = h.rows();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| h[(i, j)] - if i == j { C64::new(x, 0.0) } else { C64::new(0.0, 0.0) }).collect()).collect();
    let mut negatives = 0;
    for k in 0..n {
        let mut p = a[k][k].re;
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            negatives += 1;
        }
        for i in (k + 1)..n {
            let l = a[i][k] / p;
            let (upper, lower) = a.split_at_mut(i);
            for (x, &akj) in lower[0][(k + 1)..].iter_mut().zip(&upper[k][(k + 1)..]) {
                *x -= l * akj;
            }
        }
    }
    negatives
}

/// All eigenvalues in ascending order by bisection on the inertia count.
fn bisection_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let bound = h.frobenius_norm() + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(h, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn trace_norm_matches_bisection_oracle() {
    let mut rng = rng_from_seed(11);
    for d in 2..=5 {
        for _ in 0..5 {
            let a = random_state(d, d, &mut rng).unwrap();
            let b = random_state(d, (d / 2).max(1), &mut rng).unwrap();
            let diff = a.hermitian().sub(b.hermitian());
            let oracle: f64 = bisection_eigenvalues(diff.matrix()).iter().map(|l| l.abs()).sum();
            assert!((trace_norm(&diff) - oracle).abs() < 1e-9);
        }
    }
}

#[test]
fn eigenvalues_match_bisection_oracle() {
    let mut rng = rng_from_seed(12);
    for d in [1, 2, 3, 6] {
        let h = random_hermitian(d, &mut rng);
        let mut oracle = bisection_eigenvalues(h.matrix());
        oracle.reverse();
        let spec = eigh(&h);
        for (a, b) in spec.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
        let max_abs = oracle.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        assert!((op_norm(&h) - max_abs).abs() < 1e-10);
    }
}

#[test]
fn partial_trace_matches_index_sum() {
    for seed in 0..5 {
        let rho = sample_state(6, 6, seed).unwrap();
        let m = rho.matrix();
        let (da, db) = (2, 3);
        let keep_a = partial_trace(rho.hermitian(), (da, db), Side::A).unwrap();
        let keep_b = partial_trace(rho.hermitian(), (da, db), Side::B).unwrap();
        for i in 0..da {
            for j in 0..da {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..db {
                    s += m[(i * db + k, j * db + k)];
                }
                assert!((keep_a.matrix()[(i, j)] - s).norm() < 1e-12);
            }
        }
        for k in 0..db {
            for l in 0..db {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..da {
                    s += m[(i * db + k, i * db + l)];
                }
                assert!((keep_b.matrix()[(k, l)] - s).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn trace_norm_triangle_inequality() {
    let mut rng = rng_from_seed(13);
    for _ in 0..200 {
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        assert!(trace_norm(&a.add(&b)) <= trace_norm(&a) + trace_norm(&b) + 1e-9);
    }
}

#[test]
fn eigh_invariants() {
    let mut rng = rng_from_seed(14);
    for d in 1..=6 {
        let h = random_hermitian(d, &mut rng);
        let spec = eigh(&h);
        let sum: f64 = spec.eigenvalues.iter().sum();
        assert!((sum - h.trace()).abs() < 1e-10);
        let psd = random_state(d, d, &mut rng).unwrap();
        assert!(*eigh(psd.hermitian()).eigenvalues.last().unwrap() >= -1e-9);
    }
}

#[test]
fn partial_trace_preserves_positivity_and_trace() {
    let mut rng = rng_from_seed(15);
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let rho = random_state(da * db, 2, &mut rng).unwrap();
        for side in [Side::A, Side::B] {
            let red = partial_trace(rho.hermitian(), (da, db), side).unwrap();
            assert!((red.trace() - 1.0).abs() < 1e-12);
            assert!(*eigh(&red).eigenvalues.last().unwrap() >= -1e-9);
            assert!(red.matrix().hermitian_defect() < 1e-9);
        }
    }
    let bad = HermitianMatrix::identity(5);
    assert!(partial_trace(&bad, (2, 3), Side::A).is_err());
}
