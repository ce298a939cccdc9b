//! Extremal decompositions: convex roofs (infimum of ensemble averages over
//! pure-state decompositions) and concave hulls (supremum over
//! decompositions), plus the entanglement functionals built on them.
//!
//! Every length-`m` pure-state decomposition of a rank-`r` state
//! `ρ = Σ_k λ_k |e_k><e_k|` has the form `|ψ̃_i> = Σ_k V_ik √λ_k |e_k>` for an
//! `m × r` isometry `V`; the weight of atom `i` is `<ψ̃_i|ψ̃_i>`. The optimizer
//! walks over isometries with two-row complex Givens rotations, which act on
//! the unnormalized atoms directly, so each trial move re-evaluates only the
//! two atoms it touches.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{Domain, LogBase, ReducedEntropy, StateFunctional, TruncatedEntropy};
use crate::linalg::{norm_sqr, CMatrix, HermitianMatrix, C64, ZERO};
use crate::states::{gaussian_c64, DensityMatrix, Ensemble, PureEnsemble, PureState};

/// Eigenvalues of ρ above this count toward its rank.
pub const RANK_TOL: f64 = 1e-9;
/// Atoms lighter than this are dropped from reported ensembles.
pub const MIN_ATOM_WEIGHT: f64 = 1e-12;
const ISOMETRY_TOL: f64 = 1e-9;
const GRID_POINTS: usize = 8;
const GOLDEN_ITERS: usize = 18;
const CG_MAX_ITERS: usize = 400;
const FD_STEP: f64 = 1e-6;
const LAMBDA_GRID: [f64; 9] = [0.0, 0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Debug)]
pub struct RoofOptions {
    /// Decomposition length `m`; defaults to `rank²`.
    pub members: Option<usize>,
    pub restarts: usize,
    /// A sweep improving the objective by less than this ends a restart.
    pub tol: f64,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Concave hull only: pin the mixing parameter λ instead of optimizing it.
    pub fixed_mixing: Option<f64>,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions { members: None, restarts: 32, tol: 1e-9, seed: 0, max_sweeps: 300, fixed_mixing: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    /// The reported value is at least the true infimum.
    Upper,
    /// The reported value is at most the true supremum.
    Lower,
}

/// Point of the decomposition manifold: an isometry and the pure ensemble it
/// induces.
#[derive(Clone, Debug)]
pub struct DecompositionPoint {
    pub isometry: CMatrix,
    pub weights: Vec<f64>,
    pub atoms: Vec<PureState>,
}

#[derive(Clone, Debug)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub bound: BoundDirection,
    pub restarts: usize,
    /// Final objective of each restart, in restart order.
    pub best_per_restart: Vec<f64>,
    /// Whether the winning restart stopped on the tolerance rather than the sweep cap.
    pub converged: bool,
    pub members: usize,
    /// Concave hull only: mixing parameter of the winning ensemble.
    pub mixing: Option<f64>,
    pub point: DecompositionPoint,
}

/// Eigen-data of ρ restricted to its support.
struct Support {
    dim: usize,
    /// `√λ_k |e_k>` as rows.
    scaled: Vec<Vec<C64>>,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Self {
        let spec = rho.spectrum();
        let scaled = spec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_TOL)
            .map(|(k, &l)| spec.eigenvector(k).into_iter().map(|z| z * l.sqrt()).collect())
            .collect();
        Support { dim: rho.dim(), scaled }
    }

    fn rank(&self) -> usize {
        self.scaled.len()
    }

    /// Unnormalized atoms `ψ̃_i = Σ_k V_ik √λ_k e_k`.
    fn atoms(&self, v: &CMatrix) -> Vec<Vec<C64>> {
        (0..v.rows())
            .map(|i| {
                let mut row = vec![ZERO; self.dim];
                for (k, sk) in self.scaled.iter().enumerate() {
                    let c = v[(i, k)];
                    for (dst, &s) in row.iter_mut().zip(sk) {
                        *dst += c * s;
                    }
                }
                row
            })
            .collect()
    }
}

fn check_isometry(v: &CMatrix) -> Result<()> {
    if v.rows() < v.cols() {
        return Err(Error::NotIsometric(f64::INFINITY));
    }
    let dev = v.adjoint().matmul(v).max_abs_diff(&CMatrix::identity(v.cols()));
    if dev > ISOMETRY_TOL {
        return Err(Error::NotIsometric(dev));
    }
    Ok(())
}

fn split_atoms(rows: &[Vec<C64>]) -> (Vec<f64>, Vec<PureState>, Vec<usize>) {
    let mut weights = Vec::new();
    let mut atoms = Vec::new();
    let mut kept = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let w = norm_sqr(r);
        if w < MIN_ATOM_WEIGHT {
            continue;
        }
        if let Ok(p) = PureState::normalized(r.clone()) {
            weights.push(w);
            atoms.push(p);
            kept.push(i);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    (weights, atoms, kept)
}

fn to_pure_ensemble(weights: Vec<f64>, atoms: &[PureState], dims: Option<(usize, usize)>) -> Result<PureEnsemble> {
    let states: Vec<DensityMatrix> = atoms
        .iter()
        .map(|p| {
            let mut d = p.to_density();
            d.set_dims(dims);
            d
        })
        .collect();
    PureEnsemble::new(Ensemble::new(weights, states)?)
}

/// Pure ensemble induced by the isometry `v` (rows = atoms, columns = the
/// eigenvectors of ρ in descending eigenvalue order).
pub fn decomposition_from_isometry(rho: &DensityMatrix, v: &CMatrix) -> Result<PureEnsemble> {
    let support = Support::of(rho);
    if v.cols() != support.rank() {
        return Err(Error::DimensionMismatch { expected: support.rank(), got: v.cols() });
    }
    check_isometry(v)?;
    let (weights, atoms, _) = split_atoms(&support.atoms(v));
    to_pure_ensemble(weights, &atoms, rho.dims())
}

/// Haar-distributed `m × r` isometry (Gram-Schmidt on a Gaussian matrix).
pub fn random_isometry(m: usize, r: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(m >= r);
    loop {
        let mut cols: Vec<Vec<C64>> = (0..r).map(|_| (0..m).map(|_| gaussian_c64(rng)).collect()).collect();
        let mut ok = true;
        for k in 0..r {
            for _pass in 0..2 {
                for j in 0..k {
                    let (done, rest) = cols.split_at_mut(k);
                    let proj: C64 = done[j].iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                    for (x, &q) in rest[0].iter_mut().zip(done[j].iter()) {
                        *x -= proj * q;
                    }
                }
            }
            let n = norm_sqr(&cols[k]).sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            for x in cols[k].iter_mut() {
                *x /= n;
            }
        }
        if ok {
            return CMatrix::from_fn(m, r, |i, k| cols[k][i]);
        }
    }
}

fn padded_identity(m: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(m, r, |i, k| if i == k { C64::new(1.0, 0.0) } else { ZERO })
}

/// Objective contribution of one unnormalized atom.
trait AtomCost: Sync {
    fn cost(&self, row: &[C64], scratch: &mut Vec<C64>) -> Result<f64>;
}

/// `w f(ψ)` for the roof.
struct PureCost<'a> {
    f: &'a dyn StateFunctional,
}

impl AtomCost for PureCost<'_> {
    fn cost(&self, row: &[C64], scratch: &mut Vec<C64>) -> Result<f64> {
        let w = norm_sqr(row);
        if w < 1e-300 {
            return Ok(0.0);
        }
        let s = 1.0 / w.sqrt();
        scratch.clear();
        scratch.extend(row.iter().map(|z| z * s));
        let v = self.f.eval_pure(scratch)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        Ok(w * v)
    }
}

/// `-w f((1-λ)|ψ><ψ| + λρ)` for the hull (negated: the optimizer minimizes).
struct MixedCost<'a> {
    f: &'a dyn StateFunctional,
    rho: &'a CMatrix,
    lambda: f64,
}

impl AtomCost for MixedCost<'_> {
    fn cost(&self, row: &[C64], scratch: &mut Vec<C64>) -> Result<f64> {
        let w = norm_sqr(row);
        if w < 1e-300 {
            return Ok(0.0);
        }
        let s = 1.0 / w.sqrt();
        scratch.clear();
        scratch.extend(row.iter().map(|z| z * s));
        let v = if self.lambda >= 1.0 {
            self.f.eval(&DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(self.rho.clone())))?
        } else {
            let pure = CMatrix::outer(scratch, scratch);
            let m = &pure.scale(1.0 - self.lambda) + &self.rho.scale(self.lambda);
            self.f.eval(&DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(m)))?
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        Ok(-w * v)
    }
}

/// Working state of one descent run.
struct Descent {
    rows: Vec<Vec<C64>>,
    iso: CMatrix,
    /// `√λ_k <e_k|` as rows, so that `W = V · basis`.
    basis: CMatrix,
    costs: Vec<f64>,
}

impl Descent {
    fn new(support: &Support, iso: CMatrix, obj: &dyn AtomCost) -> Result<Self> {
        let rows = support.atoms(&iso);
        let mut scratch = Vec::new();
        let costs = rows.iter().map(|r| obj.cost(r, &mut scratch)).collect::<Result<Vec<_>>>()?;
        let basis = CMatrix::from_fn(support.rank(), support.dim, |k, j| support.scaled[k][j]);
        Ok(Descent { rows, iso, basis, costs })
    }

    fn total(&self) -> f64 {
        self.costs.iter().sum()
    }

    fn recompute(&mut self, obj: &dyn AtomCost) -> Result<()> {
        let mut scratch = Vec::new();
        for (c, r) in self.costs.iter_mut().zip(&self.rows) {
            *c = obj.cost(r, &mut scratch)?;
        }
        Ok(())
    }

    /// Runs sweeps until one improves by less than `tol`. Returns whether it
    /// converged before the sweep cap.
    fn run(&mut self, obj: &dyn AtomCost, tol: f64, max_sweeps: usize) -> Result<bool> {
        let m = self.rows.len();
        if m < 2 {
            return Ok(true);
        }
        let mut buf = PairBuffers::new(self.rows[0].len());
        for _ in 0..max_sweeps {
            self.conjugate_gradient(obj, tol, CG_MAX_ITERS)?;
            let mut gained = 0.0;
            for i in 0..m {
                for j in (i + 1)..m {
                    gained += self.optimize_pair(i, j, obj, &mut buf)?;
                }
            }
            if gained < tol {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Riemannian gradient of the objective under `W ↦ e^{tA} W`, as a
    /// skew-Hermitian `m × m` matrix. Per-atom gradients come from central
    /// differences.
    fn gradient(&self, obj: &dyn AtomCost) -> Result<CMatrix> {
        let m = self.rows.len();
        let d = self.rows[0].len();
        let mut scratch = Vec::new();
        let mut probe = vec![ZERO; d];
        let mut g = vec![vec![ZERO; d]; m];
        for (row, gi) in self.rows.iter().zip(g.iter_mut()) {
            let n = norm_sqr(row).sqrt();
            if n < 1e-150 {
                continue;
            }
            let h = FD_STEP * n;
            probe.copy_from_slice(row);
            for k in 0..d {
                let mut parts = [0.0; 2];
                for (part, unit) in parts.iter_mut().zip([C64::new(h, 0.0), C64::new(0.0, h)]) {
                    probe[k] = row[k] + unit;
                    let up = obj.cost(&probe, &mut scratch)?;
                    probe[k] = row[k] - unit;
                    let down = obj.cost(&probe, &mut scratch)?;
                    probe[k] = row[k];
                    *part = (up - down) / (4.0 * h);
                }
                gi[k] = C64::new(parts[0], parts[1]);
            }
        }
        let overlap = CMatrix::from_fn(m, m, |i, j| g[i].iter().zip(&self.rows[j]).map(|(a, b)| a.conj() * b).sum());
        Ok(CMatrix::from_fn(m, m, |i, j| overlap[(i, j)].conj() - overlap[(j, i)]))
    }

    /// Polak-Ribière conjugate gradient along one-parameter unitary subgroups.
    fn conjugate_gradient(&mut self, obj: &dyn AtomCost, tol: f64, max_iters: usize) -> Result<()> {
        let mut value = self.total();
        let mut prev: Option<(CMatrix, CMatrix)> = None;
        let mut step: Option<f64> = None;
        let mut stalled = 0;
        for _ in 0..max_iters {
            let grad = self.gradient(obj)?;
            let gg = lie_inner(&grad, &grad);
            if gg.sqrt() < 1e-13 {
                break;
            }
            let mut dir = grad.scale(-1.0);
            if let Some((pg, pd)) = &prev {
                let beta = (lie_inner(&grad, &(&grad - pg)) / lie_inner(pg, pg)).max(0.0);
                if beta > 0.0 {
                    let cand = &dir + &pd.scale(beta);
                    if lie_inner(&grad, &cand) < 0.0 {
                        dir = cand;
                    }
                }
            }
            let norm = lie_inner(&dir, &dir).sqrt();
            let t0 = step.unwrap_or(0.1 / norm);
            let (t, new_value) = self.retraction_search(&dir, value, t0, obj)?;
            if t == 0.0 {
                if prev.is_none() {
                    break;
                }
                prev = None;
                continue;
            }
            let gain = value - new_value;
            value = self.total();
            step = Some(t);
            prev = Some((grad, dir));
            if gain < 0.1 * tol {
                stalled += 1;
                if stalled >= 3 {
                    break;
                }
            } else {
                stalled = 0;
            }
        }
        Ok(())
    }

    /// Minimizes along the QR retraction `t ↦ qf(V + tDV)` and applies the
    /// best step found.
    fn retraction_search(&mut self, dir: &CMatrix, value: f64, t0: f64, obj: &dyn AtomCost) -> Result<(f64, f64)> {
        let m = self.rows.len();
        let d = self.rows[0].len();
        let tangent = dir.matmul(&self.iso);
        let basis = &self.basis;
        let iso = &self.iso;
        let mut scratch = Vec::new();
        let mut err = None;
        let mut phi = |t: f64| -> f64 {
            let v = retract(iso, &tangent, t);
            let w = v.matmul(basis);
            let mut total = 0.0;
            for i in 0..m {
                match obj.cost(&w.as_slice()[i * d..(i + 1) * d], &mut scratch) {
                    Ok(c) => total += c,
                    Err(e) => {
                        err.get_or_insert(e);
                        return f64::INFINITY;
                    }
                }
            }
            total
        };
        let mut best = (0.0, value);
        let mut t = t0;
        let mut ft = phi(t);
        if ft < value {
            let (mut a, mut b) = (0.0, 2.0 * t);
            let mut fb = phi(b);
            let mut grown = 0;
            while fb < ft && grown < 30 {
                a = t;
                t = b;
                ft = fb;
                b *= 2.0;
                fb = phi(b);
                grown += 1;
            }
            best = golden(&mut phi, a, b, (t, ft));
        } else {
            for _ in 0..40 {
                let b = t;
                t /= 4.0;
                ft = phi(t);
                if ft < value {
                    best = golden(&mut phi, 0.0, b, (t, ft));
                    break;
                }
            }
        }
        if let Some(e) = err {
            return Err(e);
        }
        if !(best.1 < value) {
            return Ok((0.0, value));
        }
        let t = best.0;
        self.iso = retract(&self.iso, &tangent, t);
        let w = self.iso.matmul(&self.basis);
        for (i, r) in self.rows.iter_mut().enumerate() {
            r.copy_from_slice(w.row(i));
        }
        self.recompute(obj)?;
        Ok((t, self.total()))
    }

    fn optimize_pair(&mut self, i: usize, j: usize, obj: &dyn AtomCost, buf: &mut PairBuffers) -> Result<f64> {
        let base = self.costs[i] + self.costs[j];
        if norm_sqr(&self.rows[i]) + norm_sqr(&self.rows[j]) < 1e-300 {
            return Ok(0.0);
        }
        let (ri, rj) = (&self.rows[i], &self.rows[j]);
        let mut err: Option<Error> = None;
        let mut eval = |theta: f64, phi: f64| -> f64 {
            match buf.rotated_cost(ri, rj, theta, phi, obj) {
                Ok((v, _, _)) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let mut best = (0.0, 0.0, base);
        for phi0 in [0.0, FRAC_PI_2] {
            let (t, v) = line_search(|t| eval(t, phi0), -FRAC_PI_2, PI / GRID_POINTS as f64, 0.0, base);
            if v < best.2 {
                best = (t, phi0, v);
            }
        }
        if best.0 != 0.0 {
            let theta = best.0;
            let (p, v) = line_search(|p| eval(theta, p), 0.0, 2.0 * PI / GRID_POINTS as f64, best.1, best.2);
            if v < best.2 {
                best = (theta, p, v);
            }
            let phi = best.1;
            let (t, v) = line_search(|t| eval(t, phi), -FRAC_PI_2, PI / GRID_POINTS as f64, best.0, best.2);
            if v < best.2 {
                best = (t, phi, v);
            }
        }
        if let Some(e) = err {
            return Err(e);
        }
        let (theta, phi, value) = best;
        if !(value < base) {
            return Ok(0.0);
        }
        let (v, ci, cj) = buf.rotated_cost(&self.rows[i], &self.rows[j], theta, phi, obj)?;
        let (c, s, e) = rotation(theta, phi);
        rotate_rows(&mut self.rows, i, j, c, s, e);
        let (mut a, mut b) = (self.iso.row(i).to_vec(), self.iso.row(j).to_vec());
        rotate_pair(&mut a, &mut b, c, s, e);
        self.iso.row_mut(i).copy_from_slice(&a);
        self.iso.row_mut(j).copy_from_slice(&b);
        self.costs[i] = ci;
        self.costs[j] = cj;
        Ok(base - v)
    }
}

/// Q factor of `V + tT` by modified Gram-Schmidt, applied twice.
fn retract(v: &CMatrix, tangent: &CMatrix, t: f64) -> CMatrix {
    let (m, r) = (v.rows(), v.cols());
    let mut q = CMatrix::from_fn(m, r, |i, k| v[(i, k)] + tangent[(i, k)] * t);
    for k in 0..r {
        for _pass in 0..2 {
            for j in 0..k {
                let proj: C64 = (0..m).map(|i| q[(i, j)].conj() * q[(i, k)]).sum();
                for i in 0..m {
                    let qij = q[(i, j)];
                    q[(i, k)] -= proj * qij;
                }
            }
        }
        let n = (0..m).map(|i| q[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..m {
            q[(i, k)] /= n;
        }
    }
    q
}

/// `Re Tr(A† B)`.
fn lie_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x.conj() * y).re).sum()
}

struct PairBuffers {
    a: Vec<C64>,
    b: Vec<C64>,
    scratch: Vec<C64>,
}

impl PairBuffers {
    fn new(d: usize) -> Self {
        PairBuffers { a: vec![ZERO; d], b: vec![ZERO; d], scratch: Vec::with_capacity(d) }
    }

    fn rotated_cost(&mut self, ri: &[C64], rj: &[C64], theta: f64, phi: f64, obj: &dyn AtomCost) -> Result<(f64, f64, f64)> {
        let (c, s, e) = rotation(theta, phi);
        for k in 0..ri.len() {
            self.a[k] = ri[k] * c - rj[k] * (e * s);
            self.b[k] = ri[k] * (e.conj() * s) + rj[k] * c;
        }
        let ca = obj.cost(&self.a, &mut self.scratch)?;
        let cb = obj.cost(&self.b, &mut self.scratch)?;
        Ok((ca + cb, ca, cb))
    }
}

/// `[[c, -e s], [conj(e) s, c]]`, unitary for real `c, s` with `c² + s² = 1`.
fn rotation(theta: f64, phi: f64) -> (f64, f64, C64) {
    (theta.cos(), theta.sin(), C64::from_polar(1.0, phi))
}

fn rotate_pair(a: &mut [C64], b: &mut [C64], c: f64, s: f64, e: C64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xa, yb) = (*x, *y);
        *x = xa * c - yb * (e * s);
        *y = xa * (e.conj() * s) + yb * c;
    }
}

fn rotate_rows(rows: &mut [Vec<C64>], i: usize, j: usize, c: f64, s: f64, e: C64) {
    let (lo, hi) = rows.split_at_mut(j);
    rotate_pair(&mut lo[i], &mut hi[0], c, s, e);
}

/// Grid of `GRID_POINTS` samples `start + k·step`, then golden-section
/// refinement around the best sample. `incumbent` is the current point with
/// value `incumbent_value`; the best point seen overall is returned.
fn line_search(mut g: impl FnMut(f64) -> f64, start: f64, step: f64, incumbent: f64, incumbent_value: f64) -> (f64, f64) {
    let mut best = (incumbent, incumbent_value);
    for k in 0..GRID_POINTS {
        let x = start + step * k as f64;
        let v = g(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    golden(&mut g, best.0 - step, best.0 + step, best)
}

fn golden(g: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64, mut best: (f64, f64)) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        }
    }
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    best
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn initial_isometry(m: usize, r: usize, seed: u64, restart: usize) -> CMatrix {
    if restart == 0 {
        padded_identity(m, r)
    } else {
        random_isometry(m, r, &mut restart_rng(seed, restart))
    }
}

fn check_functional(f: &dyn StateFunctional, rho: &DensityMatrix) -> Result<()> {
    if let Some(d) = f.dim() {
        if d != rho.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: rho.dim() });
        }
    }
    Ok(())
}

fn resolve_members(opts: &RoofOptions, rank: usize) -> Result<usize> {
    let m = opts.members.unwrap_or(rank * rank).max(1);
    if m < rank {
        return Err(Error::InvalidParameter(format!("decomposition length {m} is below rank {rank}")));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    Ok(m)
}

struct RunOutcome {
    value: f64,
    converged: bool,
    descent: Descent,
}

/// Order-independent choice: lowest value, ties to the lowest restart index.
fn pick_best(runs: Vec<RunOutcome>) -> (Vec<f64>, RunOutcome) {
    let trace: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(_, r)| r)
        .expect("at least one restart");
    (trace, best)
}

/// Convex roof `f_*(ρ) = inf Σ p_i f(ψ_i)` over pure decompositions of ρ.
///
/// The returned value is an upper bound on the infimum and never increases
/// as `restarts` grows with the same seed.
pub fn convex_roof(f: &dyn StateFunctional, rho: &DensityMatrix, opts: &RoofOptions) -> Result<RoofResult> {
    check_functional(f, rho)?;
    let support = Support::of(rho);
    let r = support.rank();
    let m = resolve_members(opts, r)?;
    let obj = PureCost { f };
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|k| -> Result<RunOutcome> {
            let mut descent = Descent::new(&support, initial_isometry(m, r, opts.seed, k), &obj)?;
            let converged = descent.run(&obj, opts.tol, opts.max_sweeps)?;
            Ok(RunOutcome { value: descent.total(), converged, descent })
        })
        .collect::<Result<Vec<_>>>()?;
    let (trace, best) = pick_best(runs);

    let (weights, atoms, kept) = split_atoms(&best.descent.rows);
    let ensemble = to_pure_ensemble(weights.clone(), &atoms, rho.dims())?.into_ensemble();
    let mut value = 0.0;
    for (w, a) in weights.iter().zip(&atoms) {
        value += w * f.eval_pure(a.amplitudes())?;
    }
    let isometry = CMatrix::from_fn(kept.len(), r, |i, k| best.descent.iso[(kept[i], k)]);
    Ok(RoofResult {
        value,
        ensemble,
        bound: BoundDirection::Upper,
        restarts: opts.restarts,
        best_per_restart: trace,
        converged: best.converged,
        members: m,
        mixing: None,
        point: DecompositionPoint { isometry, weights, atoms },
    })
}

/// Concave hull `f̂(ρ) = sup Σ p_i f(ρ_i)`, searched over ensembles
/// `ρ_i = (1-λ)|ψ_i><ψ_i| + λρ` built from pure decompositions `{p_i, ψ_i}`.
///
/// Every member of this family has barycenter ρ. The returned value is a lower
/// bound on the supremum and never decreases as `restarts` grows.
pub fn concave_hull(f: &dyn StateFunctional, rho: &DensityMatrix, opts: &RoofOptions) -> Result<RoofResult> {
    check_functional(f, rho)?;
    if f.domain() != Domain::AllStates {
        return Err(Error::InvalidParameter(format!("{} is only defined on pure states", f.name())));
    }
    if let Some(l) = opts.fixed_mixing {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidParameter(format!("mixing parameter {l} outside [0, 1]")));
        }
    }
    let support = Support::of(rho);
    let r = support.rank();
    let m = resolve_members(opts, r)?;
    let rho_m = rho.matrix();

    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|k| -> Result<(RunOutcome, f64)> {
            let iso = initial_isometry(m, r, opts.seed, k);
            let (descent, lambda, converged) = match opts.fixed_mixing {
                Some(lambda) => {
                    let obj = MixedCost { f, rho: rho_m, lambda };
                    let mut d = Descent::new(&support, iso, &obj)?;
                    let c = d.run(&obj, opts.tol, opts.max_sweeps)?;
                    (d, lambda, c)
                }
                None => hull_alternating(f, rho_m, &support, iso, opts)?,
            };
            Ok((RunOutcome { value: descent.total(), converged, descent }, lambda))
        })
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = runs.iter().map(|(_, l)| *l).collect();
    let runs: Vec<RunOutcome> = runs.into_iter().map(|(r, _)| r).collect();
    let trace: Vec<f64> = runs.iter().map(|r| -r.value).collect();
    let best_idx = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let lambda = lambdas[best_idx];
    let best = runs.into_iter().nth(best_idx).expect("index in range");

    let (weights, atoms, kept) = split_atoms(&best.descent.rows);
    let dims = rho.dims();
    let ensemble = if lambda >= 1.0 {
        Ensemble::point_mass(rho.clone())
    } else {
        let states = atoms
            .iter()
            .map(|p| {
                let mut d = p.to_density().mix(rho, lambda)?;
                d.set_dims(dims);
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(weights.clone(), states)?
    };
    let value = ensemble.iter().map(|(w, a)| f.eval(a).map(|v| w * v)).sum::<Result<f64>>()?;
    let isometry = CMatrix::from_fn(kept.len(), r, |i, k| best.descent.iso[(kept[i], k)]);
    Ok(RoofResult {
        value,
        ensemble,
        bound: BoundDirection::Lower,
        restarts: opts.restarts,
        best_per_restart: trace,
        converged: best.converged,
        members: m,
        mixing: Some(lambda),
        point: DecompositionPoint { isometry, weights, atoms },
    })
}

/// Alternates Givens sweeps at fixed λ with a bracketed search over λ.
fn hull_alternating(
    f: &dyn StateFunctional,
    rho: &CMatrix,
    support: &Support,
    iso: CMatrix,
    opts: &RoofOptions,
) -> Result<(Descent, f64, bool)> {
    let mut lambda = 1.0;
    let mut descent = Descent::new(support, iso, &MixedCost { f, rho, lambda })?;
    let mut converged = false;
    for _ in 0..opts.max_sweeps.max(1) {
        let before = descent.total();
        // λ step
        let mut err = None;
        let mut at = |l: f64| -> f64 {
            let obj = MixedCost { f, rho, lambda: l.clamp(0.0, 1.0) };
            let mut scratch = Vec::new();
            let mut total = 0.0;
            for r in &descent.rows {
                match obj.cost(r, &mut scratch) {
                    Ok(c) => total += c,
                    Err(e) => {
                        err.get_or_insert(e);
                        return f64::INFINITY;
                    }
                }
            }
            total
        };
        let mut best = (lambda, at(lambda));
        let mut grid_best = best;
        for &l in &LAMBDA_GRID {
            let v = at(l);
            if v < grid_best.1 {
                grid_best = (l, v);
            }
        }
        if grid_best.1 < best.1 {
            best = grid_best;
        }
        let pos = LAMBDA_GRID.iter().position(|&l| l == best.0);
        let (lo, hi) = match pos {
            Some(p) => (LAMBDA_GRID[p.saturating_sub(1)], LAMBDA_GRID[(p + 1).min(LAMBDA_GRID.len() - 1)]),
            None => ((best.0 - 0.05).max(0.0), (best.0 + 0.05).min(1.0)),
        };
        best = golden(&mut |l| at(l.clamp(lo, hi)), lo, hi, best);
        if let Some(e) = err {
            return Err(e);
        }
        lambda = best.0;
        let obj = MixedCost { f, rho, lambda };
        descent.recompute(&obj)?;
        // isometry step
        let sweep_converged = descent.run(&obj, opts.tol, opts.max_sweeps)?;
        if before - descent.total() < opts.tol {
            converged = sweep_converged;
            break;
        }
    }
    Ok((descent, lambda, converged))
}

/// Entanglement of formation: convex roof of the entropy of the keep-A
/// partial trace.
pub fn eof(omega: &DensityMatrix, opts: &RoofOptions, base: LogBase) -> Result<RoofResult> {
    let dims = omega.dims().ok_or_else(|| Error::InvalidParameter("state carries no bipartite dims".into()))?;
    convex_roof(&ReducedEntropy { dims, base }, omega, opts)
}

/// Convex roof of the truncated entropy `H_n`, `n ≥ 2`.
pub fn efn(omega: &DensityMatrix, n: usize, opts: &RoofOptions, base: LogBase) -> Result<RoofResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("efn requires n >= 2, got {n}")));
    }
    let dims = omega.dims().ok_or_else(|| Error::InvalidParameter("state carries no bipartite dims".into()))?;
    convex_roof(&TruncatedEntropy::new(dims, n, base)?, omega, opts)
}
