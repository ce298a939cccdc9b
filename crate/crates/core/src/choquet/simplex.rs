//! Dense phase-one simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! One artificial variable per row, objective = sum of artificials. Bland's
//! smallest-index rule picks the entering column; the leaving row comes from
//! a two-pass Harris ratio test that prefers large pivot elements.

const PIVOT_TOL: f64 = 1e-11;
const REFRESH_EVERY: usize = 50;
const RATIO_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseOneStatus {
    /// Phase one reached optimality.
    Optimal,
    /// The iteration cap was hit first.
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct PhaseOne {
    pub status: PhaseOneStatus,
    /// Sum of artificial variables at termination, i.e. the L1 residual of `A x = b`.
    pub residual: f64,
    /// Structural variables at termination (nonnegative).
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Minimizes the sum of artificials for `a x = b`, `x ≥ 0`. `a` is row-major
/// with `n` columns.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], n: usize, max_iterations: usize) -> PhaseOne {
    let m = a.len();
    debug_assert_eq!(b.len(), m);
    let width = n + m + 1;
    let rhs = n + m;
    let mut tab = vec![0.0; m * width];
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let t = &mut tab[i * width..(i + 1) * width];
        for (j, &v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[rhs] = sign * b[i];
    }
    let orig = tab.clone();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective.
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..n {
            cost[j] -= tab[i * width + j];
        }
        cost[rhs] -= tab[i * width + rhs];
    }

    let mut iterations = 0;
    let mut refreshed_at = 0;
    let status = loop {
        let mut entering = (0..n + m).find(|&j| cost[j] < -PIVOT_TOL);
        if entering.is_none() && refreshed_at != iterations {
            // Recompute the tableau from the original data before accepting
            // optimality, so accumulated round-off cannot fake a residual.
            refresh(&mut tab, &mut cost, &orig, &basis, width, n, m);
            refreshed_at = iterations;
            entering = (0..n + m).find(|&j| cost[j] < -PIVOT_TOL);
        }
        let Some(col) = entering else {
            break PhaseOneStatus::Optimal;
        };
        if iterations - refreshed_at >= REFRESH_EVERY {
            refresh(&mut tab, &mut cost, &orig, &basis, width, n, m);
            refreshed_at = iterations;
        }
        if iterations >= max_iterations {
            break PhaseOneStatus::IterationCap;
        }
        let leave = harris_row(&tab, width, m, rhs, col);
        let Some(row) = leave else {
            // Unbounded direction; cannot happen for a phase-one objective
            // bounded below by zero, but guard against round-off.
            cost[col] = 0.0;
            continue;
        };
        pivot(&mut tab, &mut cost, width, m, row, col);
        basis[row] = col;
        iterations += 1;
    };

    let mut x = vec![0.0; n];
    let mut residual = 0.0;
    for (i, &bv) in basis.iter().enumerate() {
        let v = tab[i * width + rhs].max(0.0);
        if bv < n {
            x[bv] = v;
        } else {
            residual += v;
        }
    }
    PhaseOne { status, residual, x, iterations }
}

/// Leaving row for entering column `col`: the largest pivot element among
/// rows whose ratio is within the Harris bound, or `None` if no row limits
/// the step.
fn harris_row(tab: &[f64], width: usize, m: usize, rhs: usize, col: usize) -> Option<usize> {
    let scale = (0..m).fold(0.0f64, |s, i| s.max(tab[i * width + col].abs()));
    let tol = PIVOT_TOL.max(1e-9 * scale);
    let mut bound = f64::INFINITY;
    for i in 0..m {
        let aij = tab[i * width + col];
        if aij > tol {
            bound = bound.min((tab[i * width + rhs].max(0.0) + RATIO_SLACK) / aij);
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for i in 0..m {
        let aij = tab[i * width + col];
        if aij > tol && tab[i * width + rhs].max(0.0) / aij <= bound && best.is_none_or(|(_, b)| aij > b) {
            best = Some((i, aij));
        }
    }
    best.map(|(i, _)| i)
}

/// Rebuilds `tab = B⁻¹ orig` for the current basis `B` (Gauss-Jordan with
/// partial pivoting) and the phase-one reduced costs.
fn refresh(tab: &mut [f64], cost: &mut [f64], orig: &[f64], basis: &[usize], width: usize, n: usize, m: usize) {
    // Augmented [B | orig] reduced to [I | B⁻¹ orig].
    let aw = m + width;
    let mut aug = vec![0.0; m * aw];
    for i in 0..m {
        for (k, &bv) in basis.iter().enumerate() {
            aug[i * aw + k] = orig[i * width + bv];
        }
        aug[i * aw + m..(i + 1) * aw].copy_from_slice(&orig[i * width..(i + 1) * width]);
    }
    for k in 0..m {
        let piv = (k..m)
            .max_by(|&a, &b| aug[a * aw + k].abs().total_cmp(&aug[b * aw + k].abs()))
            .unwrap_or(k);
        if aug[piv * aw + k].abs() < 1e-14 {
            // Singular basis; keep the incrementally updated tableau.
            return;
        }
        if piv != k {
            for c in 0..aw {
                aug.swap(k * aw + c, piv * aw + c);
            }
        }
        let p = aug[k * aw + k];
        for c in 0..aw {
            aug[k * aw + c] /= p;
        }
        let prow: Vec<f64> = aug[k * aw..(k + 1) * aw].to_vec();
        for i in 0..m {
            if i == k {
                continue;
            }
            let f = aug[i * aw + k];
            if f != 0.0 {
                for (v, &pv) in aug[i * aw..(i + 1) * aw].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
    }
    // Row k of the reduced system now belongs to basis[k].
    for i in 0..m {
        tab[i * width..(i + 1) * width].copy_from_slice(&aug[i * aw + m..(i + 1) * aw]);
    }
    cost.fill(0.0);
    cost[n..n + m].fill(1.0);
    for (i, &bv) in basis.iter().enumerate() {
        if bv >= n {
            for (c, v) in cost.iter_mut().enumerate() {
                *v -= tab[i * width + c];
            }
        }
    }
    for &bv in basis {
        cost[bv] = 0.0;
    }
}

fn pivot(tab: &mut [f64], cost: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = tab[row * width + col];
    for v in &mut tab[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = tab[row * width..(row + 1) * width].to_vec();
    for i in 0..m {
        if i == row {
            continue;
        }
        let f = tab[i * width + col];
        if f == 0.0 {
            continue;
        }
        for (v, &pv) in tab[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        tab[i * width + col] = 0.0;
    }
    let f = cost[col];
    for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
        *v -= f * pv;
    }
    cost[col] = 0.0;
}
