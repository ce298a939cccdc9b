//! Density matrices, finitely supported ensembles and the operations that
//! move mass around inside the state space: barycenters, refinement of atoms
//! into pure states, and steering an ensemble toward a nearby barycenter.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, trace_norm, CMatrix, HermitianMatrix, Spectrum, C64};

/// Eigenvalues above `-PSD_TOL` are accepted (and clipped to zero).
pub const PSD_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
pub const PURE_TOL: f64 = 1e-9;
/// Refined atoms lighter than this are discarded.
pub const MIN_WEIGHT: f64 = 1e-12;
/// Steering requires the barycenter's smallest eigenvalue above this.
pub const FULL_RANK_TOL: f64 = 1e-8;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    h: HermitianMatrix,
    dims: Option<(usize, usize)>,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.dims == other.dims
    }
}

impl DensityMatrix {
    /// Validates trace and positivity. Eigenvalues in `(-1e-9, 0)` are clipped
    /// to zero and the trace renormalized.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let spec = eigh(&h);
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        if min < 0.0 {
            let clipped: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let spec = Spectrum {
                eigenvalues: clipped.iter().map(|l| l / total).collect(),
                eigenvectors: spec.eigenvectors,
            };
            let h = HermitianMatrix::from_hermitian_unchecked(spec.reconstruct());
            return Ok(Self::from_parts(h, Some(spec)));
        }
        Ok(Self::from_parts(h, Some(spec)))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Trusted constructor for matrices that are states by construction.
    pub(crate) fn from_hermitian_unchecked(h: HermitianMatrix) -> Self {
        Self::from_parts(h, None)
    }

    fn from_parts(h: HermitianMatrix, spectrum: Option<Spectrum>) -> Self {
        let cell = OnceLock::new();
        if let Some(s) = spectrum {
            let _ = cell.set(s);
        }
        DensityMatrix { h, dims: None, spectrum: cell }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_hermitian_unchecked(HermitianMatrix::identity(d).scale(1.0 / d as f64))
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(probs))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let m = CMatrix::outer(psi.amplitudes(), psi.amplitudes());
        let mut d = Self::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(m));
        d.dims = psi.dims;
        d
    }

    /// Attaches a bipartite structure `dA ⊗ dB`.
    pub fn with_dims(mut self, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != self.dim() || dims.0 == 0 {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dims.0 * dims.1 });
        }
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub(crate) fn set_dims(&mut self, dims: Option<(usize, usize)>) {
        self.dims = dims;
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn matrix(&self) -> &CMatrix {
        self.h.matrix()
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| eigh(&self.h))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum().eigenvalues
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > threshold).count()
    }

    pub fn is_pure(&self) -> bool {
        self.eigenvalues().get(1).is_none_or(|&l| l <= PURE_TOL)
    }

    pub fn purity(&self) -> f64 {
        self.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        check_dim(self.dim(), other.dim())?;
        let h = self.h.scale(1.0 - t).add(&other.h.scale(t));
        let mut out = DensityMatrix::from_hermitian_unchecked(h);
        out.dims = self.dims.or(other.dims);
        Ok(out)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(trace_norm(&self.h.sub(&other.h)))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Option<(usize, usize)>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("pure state needs at least one amplitude".into()));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n2));
        }
        Ok(PureState { amplitudes, dims: None })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Ok(PureState { amplitudes, dims: None })
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = C64::new(1.0, 0.0);
        PureState { amplitudes: v, dims: None }
    }

    pub fn with_dims(mut self, dims: (usize, usize)) -> Result<Self> {
        check_dim(self.dim(), dims.0 * dims.1)?;
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Finitely supported probability measure on states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    atoms: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, atoms: Vec<DensityMatrix>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble needs at least one atom".into()));
        }
        if weights.len() != atoms.len() {
            return Err(Error::InvalidEnsemble(format!("{} weights for {} atoms", weights.len(), atoms.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidEnsemble(format!("weights must be positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, not 1")));
        }
        let d = atoms[0].dim();
        for a in &atoms {
            check_dim(d, a.dim())?;
        }
        Ok(Ensemble { weights, atoms })
    }

    pub fn point_mass(rho: DensityMatrix) -> Self {
        Ensemble { weights: vec![1.0], atoms: vec![rho] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> &[DensityMatrix] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.atoms.iter().find_map(|a| a.dims())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.weights.iter().copied().zip(self.atoms.iter())
    }

    pub fn barycenter(&self) -> DensityMatrix {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, a) in self.iter() {
            acc = &acc + &a.matrix().scale(w);
        }
        let mut out = DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(acc));
        out.dims = self.dims();
        out
    }

    /// Integral of `f` against the ensemble.
    pub fn average(&self, mut f: impl FnMut(&DensityMatrix) -> f64) -> f64 {
        self.iter().map(|(w, a)| w * f(a)).sum()
    }
}

/// Ensemble all of whose atoms are rank one.
#[derive(Clone, Debug, PartialEq)]
pub struct PureEnsemble(Ensemble);

impl PureEnsemble {
    pub fn new(e: Ensemble) -> Result<Self> {
        if let Some(i) = e.atoms.iter().position(|a| !a.is_pure()) {
            return Err(Error::InvalidEnsemble(format!("atom {i} is not pure")));
        }
        Ok(PureEnsemble(e))
    }

    pub fn from_pure_states(weights: Vec<f64>, states: &[PureState]) -> Result<Self> {
        let atoms = states.iter().map(DensityMatrix::from_pure).collect();
        Ok(PureEnsemble(Ensemble::new(weights, atoms)?))
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.0
    }

    pub fn into_ensemble(self) -> Ensemble {
        self.0
    }
}

impl std::ops::Deref for PureEnsemble {
    type Target = Ensemble;
    fn deref(&self) -> &Ensemble {
        &self.0
    }
}

pub fn barycenter(e: &Ensemble) -> DensityMatrix {
    e.barycenter()
}

/// Replaces every atom by its eigen-ensemble, scaling weights accordingly.
pub fn refine_to_pure(e: &Ensemble) -> PureEnsemble {
    let dims = e.dims();
    let mut weights = Vec::new();
    let mut atoms = Vec::new();
    for (w, a) in e.iter() {
        let spec = a.spectrum();
        for (k, &l) in spec.eigenvalues.iter().enumerate() {
            let wk = w * l;
            if wk < MIN_WEIGHT {
                continue;
            }
            let v = spec.eigenvector(k);
            let mut atom = DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(
                CMatrix::outer(&v, &v),
            ));
            atom.dims = dims;
            weights.push(wk);
            atoms.push(atom);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    PureEnsemble(Ensemble { weights, atoms })
}

/// Output of [`steer_barycenter`].
#[derive(Clone, Debug)]
pub struct Steered {
    pub ensemble: Ensemble,
    /// Mixing coefficient ε.
    pub epsilon: f64,
    /// Shared state τ mixed into every atom.
    pub mixing_state: DensityMatrix,
}

/// Deforms `e` so its barycenter becomes `target`.
///
/// Every atom is mixed with one shared state τ: `ρ_i' = (1-ε)ρ_i + ε τ` with
/// `τ = ρ₀ + Δ/ε`, `Δ = target - ρ₀`, and ε the smallest value keeping τ
/// positive. Only full-rank barycenters are supported.
pub fn steer_barycenter(e: &Ensemble, target: &DensityMatrix) -> Result<Steered> {
    check_dim(e.dim(), target.dim())?;
    let rho0 = e.barycenter();
    let spec = rho0.spectrum();
    let lmin = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if lmin <= FULL_RANK_TOL {
        return Err(Error::Unsupported(format!(
            "barycenter is rank deficient (smallest eigenvalue {lmin:.3e}); steering needs a full-rank barycenter"
        )));
    }
    let inv_sqrt = spec.map(|l| 1.0 / l.sqrt());
    let delta = target.hermitian().sub(rho0.hermitian());
    let x = delta.scale(-1.0).congruence(&inv_sqrt);
    let lmax = eigvalsh(&x)[0];
    let epsilon = lmax.clamp(1e-12, 1.0);
    let tau_h = rho0.hermitian().add(&delta.scale(1.0 / epsilon));
    let mut tau = DensityMatrix::new(tau_h)?;
    tau.dims = e.dims().or(target.dims());
    let atoms = e.atoms.iter().map(|a| a.mix(&tau, epsilon)).collect::<Result<Vec<_>>>()?;
    Ok(Steered { ensemble: Ensemble { weights: e.weights.clone(), atoms }, epsilon, mixing_state: tau })
}

/// Matching distance between ensembles: the minimum over atom matchings
/// (shorter side padded with zero-weight atoms) of
/// `Σ|π_i - π'_i| + Σ min(π_i, π'_i) ‖ρ_i - ρ'_i‖₁`.
pub fn ensemble_distance(a: &Ensemble, b: &Ensemble) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let n = a.len().max(b.len());
    let weight = |e: &Ensemble, i: usize| e.weights.get(i).copied().unwrap_or(0.0);
    let mut cost = vec![vec![0.0; n]; n];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let (wa, wb) = (weight(a, i), weight(b, j));
            let overlap = wa.min(wb);
            let dist = if overlap > 0.0 { a.atoms[i].trace_distance(&b.atoms[j])? } else { 0.0 };
            *c = (wa - wb).abs() + overlap * dist;
        }
    }
    Ok(min_cost_assignment(&cost).0)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
        if let Ok(p) = PureState::normalized(v) {
            return p;
        }
    }
}

/// Random state of the requested rank from the induced (Ginibre) measure.
pub fn random_state(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("need 1 <= rank <= dim, got rank {rank}, dim {dim}")));
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| gaussian_c64(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    Ok(DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(m.scale(1.0 / tr))))
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    HermitianMatrix::from_hermitian_unchecked(g)
}

/// Random ensemble with `atoms` atoms of random ranks.
pub fn random_ensemble(dim: usize, atoms: usize, rng: &mut impl Rng) -> Result<Ensemble> {
    if atoms == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one atom".into()));
    }
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let states = (0..atoms)
        .map(|_| {
            let rank = rng.random_range(1..=dim.max(1));
            random_state(dim, rank, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(weights, states)
}

pub fn sample_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_state(dim, rank, &mut rng_from_seed(seed))
}

pub fn sample_ensemble(dim: usize, atoms: usize, seed: u64) -> Result<Ensemble> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    random_ensemble(dim, atoms, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(d: usize, k: usize) -> DensityMatrix {
        PureState::basis(d, k).to_density()
    }

    fn qubit_pair() -> Ensemble {
        Ensemble::new(vec![0.5, 0.5], vec![ket(2, 0), ket(2, 1)]).unwrap()
    }

    #[test]
    fn density_validation() {
        assert!(matches!(DensityMatrix::from_diagonal(&[0.6, 0.6]), Err(Error::InvalidTrace(_))));
        assert!(matches!(DensityMatrix::from_diagonal(&[1.1, -0.1]), Err(Error::NotPsd(_))));
        let clipped = DensityMatrix::from_diagonal(&[1.0 + 5e-10, -5e-10]).unwrap();
        assert_eq!(clipped.eigenvalues()[1], 0.0);
        assert!((clipped.hermitian().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![], vec![]).is_err());
        assert!(Ensemble::new(vec![0.5, 0.6], vec![ket(2, 0), ket(2, 1)]).is_err());
        assert!(Ensemble::new(vec![1.0, 0.0], vec![ket(2, 0), ket(2, 1)]).is_err());
        assert!(matches!(
            Ensemble::new(vec![0.5, 0.5], vec![ket(2, 0), ket(3, 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn barycenter_examples() {
        let rho = sample_state(3, 2, 1).unwrap();
        let b = Ensemble::point_mass(rho.clone()).barycenter();
        assert!(b.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let b = qubit_pair().barycenter();
        assert!(b.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn refine_examples() {
        let e = qubit_pair();
        let r = refine_to_pure(&e);
        assert_eq!(r.weights(), &[0.5, 0.5]);
        assert!(r.atoms()[0].matrix().max_abs_diff(ket(2, 0).matrix()) < 1e-15);

        let r = refine_to_pure(&Ensemble::point_mass(DensityMatrix::maximally_mixed(2)));
        assert_eq!(r.len(), 2);
        assert!((r.weights()[0] - 0.5).abs() < 1e-15);
        assert!(r.atoms()[0].matrix().max_abs_diff(ket(2, 0).matrix()) < 1e-15);
        assert!(r.atoms()[1].matrix().max_abs_diff(ket(2, 1).matrix()) < 1e-15);
    }

    #[test]
    fn refine_preserves_barycenter() {
        for seed in 0..500 {
            let e = sample_ensemble(2 + (seed as usize % 3), 1 + (seed as usize % 4), seed).unwrap();
            let r = refine_to_pure(&e);
            assert!(r.barycenter().matrix().max_abs_diff(e.barycenter().matrix()) < 1e-10);
            assert!(r.atoms().iter().all(DensityMatrix::is_pure));
        }
    }

    #[test]
    fn steer_closed_form_example() {
        let target = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let s = steer_barycenter(&qubit_pair(), &target).unwrap();
        assert!((s.epsilon - 0.2).abs() < 1e-12);
        assert!(s.mixing_state.matrix().max_abs_diff(ket(2, 0).matrix()) < 1e-12);
        let a = &s.ensemble.atoms();
        assert!(a[0].matrix().max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-12);
        assert!(a[1].matrix().max_abs_diff(&CMatrix::diag_real(&[0.2, 0.8])) < 1e-12);
        assert!(s.ensemble.barycenter().matrix().max_abs_diff(target.matrix()) < 1e-12);
    }

    #[test]
    fn steer_to_own_barycenter_is_identity() {
        let e = sample_ensemble(3, 4, 9).unwrap();
        let s = steer_barycenter(&e, &e.barycenter()).unwrap();
        assert_eq!(s.epsilon, 1e-12);
        for (a, b) in s.ensemble.atoms().iter().zip(e.atoms()) {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-9);
        }
    }

    #[test]
    fn steer_rejects_rank_deficient_barycenter() {
        let e = Ensemble::point_mass(ket(2, 0));
        let err = steer_barycenter(&e, &DensityMatrix::maximally_mixed(2)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn steer_random_perturbation() {
        let mut rng = rng_from_seed(21);
        for _ in 0..20 {
            let e = random_ensemble(3, 4, &mut rng).unwrap();
            let rho0 = e.barycenter();
            let mut p = random_hermitian(3, &mut rng);
            let shift = p.trace() / 3.0;
            p = p.sub(&HermitianMatrix::identity(3).scale(shift));
            let p = p.scale(0.01 / crate::linalg::op_norm(&p) * rho0.eigenvalues()[2]);
            let target = DensityMatrix::new(rho0.hermitian().add(&p)).unwrap();
            let s = steer_barycenter(&e, &target).unwrap();
            assert!(s.ensemble.barycenter().matrix().max_abs_diff(target.matrix()) < 1e-9);
            for (a, b) in s.ensemble.atoms().iter().zip(e.atoms()) {
                assert!(a.trace_distance(b).unwrap() <= 2.0 * s.epsilon + 1e-12);
            }
        }
    }

    #[test]
    fn sampling_contracts() {
        let r = sample_state(2, 1, 4).unwrap();
        assert!(r.eigenvalues()[1].abs() < 1e-9);
        let f = sample_state(4, 4, 4).unwrap();
        assert!(f.eigenvalues()[3] > 1e-9);
        assert!((f.hermitian().trace() - 1.0).abs() < 1e-12);
        assert_eq!(sample_state(3, 2, 77).unwrap(), sample_state(3, 2, 77).unwrap());
        assert_eq!(sample_ensemble(3, 5, 8).unwrap(), sample_ensemble(3, 5, 8).unwrap());
        assert!(sample_state(2, 3, 0).is_err());
        assert!(sample_state(0, 0, 0).is_err());
    }

    #[test]
    fn distance_examples() {
        let e = sample_ensemble(2, 3, 2).unwrap();
        assert!(ensemble_distance(&e, &e).unwrap().abs() < 1e-12);
        let r = sample_state(2, 2, 1).unwrap();
        let s = sample_state(2, 1, 2).unwrap();
        let d = ensemble_distance(&Ensemble::point_mass(r.clone()), &Ensemble::point_mass(s.clone())).unwrap();
        assert!((d - r.trace_distance(&s).unwrap()).abs() < 1e-12);
    }
}
