//! Independent reference values: the two-qubit concurrence formula for the
//! entanglement of formation, and an exhaustive grid search for small roofs.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{LogBase, StateFunctional};
use crate::linalg::{eigh, eigvalsh, norm_sqr, CMatrix, HermitianMatrix, C64, ZERO};
use crate::states::DensityMatrix;

/// Upper limit on grid evaluations for [`brute_force_roof`].
pub const MAX_GRID_POINTS: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub value: f64,
    pub method: &'static str,
    pub resolution: Option<usize>,
    pub members: Option<usize>,
    pub grid_points: Option<u64>,
}

/// Binary entropy.
pub fn binary_entropy(x: f64, base: LogBase) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * base.log(p) };
    term(x) + term(1.0 - x)
}

/// Concurrence from the square roots of the eigenvalues of `√ρ ρ̃ √ρ`,
/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`, conjugation in the computational basis.
pub fn concurrence(omega: &DensityMatrix) -> Result<f64> {
    if omega.dims() != Some((2, 2)) {
        return Err(Error::InvalidParameter("concurrence requires a 2x2 bipartite state".into()));
    }
    let yy = CMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) | (3, 0) => C64::new(-1.0, 0.0),
        (1, 2) | (2, 1) => C64::new(1.0, 0.0),
        _ => ZERO,
    });
    // With ρ = X X†, the square roots of the eigenvalues of ρ ρ̃ are the
    // singular values of Xᵀ (σy⊗σy) X, read off a Hermitian embedding.
    let spec = omega.spectrum();
    let cols: Vec<usize> = (0..4).filter(|&k| spec.eigenvalues[k] > 0.0).collect();
    let r = cols.len();
    let x = CMatrix::from_fn(4, r, |i, c| spec.eigenvectors[(i, cols[c])] * spec.eigenvalues[cols[c]].sqrt());
    let b = x.transpose().matmul(&yy).matmul(&x);
    let embed = CMatrix::from_fn(2 * r, 2 * r, |i, j| match (i < r, j < r) {
        (true, false) => b[(i, j - r)],
        (false, true) => b[(j, i - r)].conj(),
        _ => ZERO,
    });
    let mut l: Vec<f64> = eigvalsh(&HermitianMatrix::from_hermitian_unchecked(embed)).into_iter().take(r).map(|v| v.max(0.0)).collect();
    l.resize(4, 0.0);
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Closed-form two-qubit entanglement of formation.
pub fn wootters_eof(omega: &DensityMatrix, base: LogBase) -> Result<f64> {
    let c = concurrence(omega)?.min(1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0, base))
}

/// Minimum of `Σ p_i f(ψ_i)` over an exhaustive angle grid of length-`m`
/// decompositions of a state of dimension at most 2, `m ≤ 3`.
///
/// Each angle takes `resolution` steps, and the grid at `2·resolution`
/// contains the one at `resolution`, so the value never increases as the
/// resolution doubles.
pub fn brute_force_roof(f: &dyn StateFunctional, rho: &DensityMatrix, m: usize, resolution: usize) -> Result<OracleReport> {
    if rho.dim() > 2 {
        return Err(Error::Unsupported(format!("grid search needs dimension <= 2, got {}", rho.dim())));
    }
    if !(1..=3).contains(&m) {
        return Err(Error::InvalidParameter(format!("grid search needs 1 <= m <= 3, got {m}")));
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let spec = eigh(rho.hermitian());
    let scaled: Vec<Vec<C64>> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-9)
        .map(|(k, &l)| spec.eigenvector(k).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let r = scaled.len();
    if m < r {
        return Err(Error::InvalidParameter(format!("m = {m} is below rank {r}")));
    }
    let report = |value, points| OracleReport {
        value,
        method: "grid",
        resolution: Some(resolution),
        members: Some(m),
        grid_points: Some(points),
    };
    let dim = rho.dim();
    let mut scratch = Vec::with_capacity(dim);
    let mut cost = |columns: &[&[C64]]| -> Result<f64> {
        // Row i of the isometry is (columns[0][i], columns[1][i], ...).
        let mut total = 0.0;
        for i in 0..m {
            let mut row = vec![ZERO; dim];
            for (k, col) in columns.iter().enumerate() {
                for (x, s) in row.iter_mut().zip(&scaled[k]) {
                    *x += col[i] * s;
                }
            }
            let w = norm_sqr(&row);
            if w < 1e-300 {
                continue;
            }
            let s = 1.0 / w.sqrt();
            scratch.clear();
            scratch.extend(row.iter().map(|z| z * s));
            total += w * f.eval_pure(&scratch)?;
        }
        Ok(total)
    };

    if r == 1 {
        let col: Vec<C64> = (0..m).map(|i| if i == 0 { C64::new(1.0, 0.0) } else { ZERO }).collect();
        return Ok(report(cost(&[&col])?, 1));
    }
    let n = resolution;
    // Polar angles on [0, π/2] include both endpoints; azimuths on [0, 2π) do not.
    let polar = |k: usize| FRAC_PI_2 * k as f64 / n as f64;
    let azimuth = |k: usize| 2.0 * PI * k as f64 / n as f64;
    let mut best = f64::INFINITY;
    if m == 2 {
        let points = ((n + 1) * n) as u64;
        check_budget(points)?;
        for a in 0..=n {
            let (c, s) = (polar(a).cos(), polar(a).sin());
            let c1 = [C64::new(c, 0.0), C64::new(s, 0.0)];
            for p in 0..n {
                let e = C64::from_polar(1.0, azimuth(p));
                let c2 = [-e * s, e * c];
                best = best.min(cost(&[&c1, &c2])?);
            }
        }
        return Ok(report(best, points));
    }
    // m = 3, rank 2: first column real and nonnegative (row phases), second
    // column a unit vector in its orthogonal complement.
    let points = ((n + 1) as u64).pow(3) * (n as u64).pow(2);
    check_budget(points)?;
    for a in 0..=n {
        for b in 0..=n {
            let (sa, ca, sb, cb) = (polar(a).sin(), polar(a).cos(), polar(b).sin(), polar(b).cos());
            let v1 = [ca, sa * cb, sa * sb];
            let (u1, u2) = orthonormal_complement(v1);
            let c1 = v1.map(|x| C64::new(x, 0.0));
            for c in 0..=n {
                let (cc, sc) = (polar(c).cos(), polar(c).sin());
                for g in 0..n {
                    let eg = C64::from_polar(sc, azimuth(g));
                    for x in 0..n {
                        let ex = C64::from_polar(1.0, azimuth(x));
                        let c2: Vec<C64> = (0..3).map(|i| ex * (u1[i] * cc + eg * u2[i])).collect();
                        best = best.min(cost(&[&c1, &c2])?);
                    }
                }
            }
        }
    }
    Ok(report(best, points))
}

fn check_budget(points: u64) -> Result<()> {
    if points > MAX_GRID_POINTS {
        return Err(Error::Unsupported(format!("grid of {points} points exceeds the limit of {MAX_GRID_POINTS}")));
    }
    Ok(())
}

/// Two real orthonormal vectors spanning the complement of the unit vector `v`.
fn orthonormal_complement(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let seed = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d: f64 = (0..3).map(|i| seed[i] * v[i]).sum();
    let mut u1 = [seed[0] - d * v[0], seed[1] - d * v[1], seed[2] - d * v[2]];
    let n = u1.iter().map(|x| x * x).sum::<f64>().sqrt();
    u1.iter_mut().for_each(|x| *x /= n);
    let u2 = [v[1] * u1[2] - v[2] * u1[1], v[2] * u1[0] - v[0] * u1[2], v[0] * u1[1] - v[1] * u1[0]];
    (u1, u2)
}
