#![allow(dead_code)]

use choquet_roof::choquet::MassPredicate;
use choquet_roof::linalg::{CMatrix, HermitianMatrix, C64};
use choquet_roof::roof::random_isometry;
use choquet_roof::states::{random_pure, random_state, DensityMatrix, Ensemble, PureState};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn bell() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    PureState::new(vec![C64::new(h, 0.0), z, z, C64::new(h, 0.0)])
        .unwrap()
        .to_density()
        .with_dims((2, 2))
        .unwrap()
}

/// `p |Φ⁺><Φ⁺| + (1-p) I/4`.
pub fn werner(p: f64) -> DensityMatrix {
    bell().mix(&DensityMatrix::maximally_mixed(4), 1.0 - p).unwrap().with_dims((2, 2)).unwrap()
}

pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    random_isometry(d, d, rng)
}

pub fn conjugate(rho: &DensityMatrix, u: &CMatrix) -> DensityMatrix {
    let m = u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part();
    let out = DensityMatrix::from_matrix(m).unwrap();
    match rho.dims() {
        Some(d) => out.with_dims(d).unwrap(),
        None => out,
    }
}

/// `Σ_k q_k a_k ⊗ b_k` with random states on each side.
pub fn separable(dims: (usize, usize), terms: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = dims.0 * dims.1;
    let mut acc = CMatrix::zeros(d, d);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let a = random_state(dims.0, rng.random_range(1..=dims.0), rng).unwrap();
        let b = random_state(dims.1, rng.random_range(1..=dims.1), rng).unwrap();
        acc = &acc + &a.matrix().kron(b.matrix()).scale(w / total);
    }
    DensityMatrix::from_matrix(acc.hermitian_part()).unwrap().with_dims(dims).unwrap()
}

/// Splits every atom into two along a random grouping of its eigenvectors
/// (or into an explicit convex pair for pure atoms, which cannot be split).
/// The result dominates the input.
pub fn split_atoms(e: &Ensemble, rng: &mut impl Rng) -> Ensemble {
    let mut weights = Vec::new();
    let mut atoms = Vec::new();
    for (w, a) in e.iter() {
        let spec = a.spectrum();
        let r = a.rank(1e-9);
        if r < 2 {
            weights.push(w);
            atoms.push(a.clone());
            continue;
        }
        let mut idx: Vec<usize> = (0..r).collect();
        idx.shuffle(rng);
        let cut = rng.random_range(1..r);
        for group in [&idx[..cut], &idx[cut..]] {
            let mass: f64 = group.iter().map(|&k| spec.eigenvalues[k]).sum();
            let mut m = CMatrix::zeros(a.dim(), a.dim());
            for &k in group {
                let v = spec.eigenvector(k);
                m = &m + &CMatrix::outer(&v, &v).scale(spec.eigenvalues[k] / mass);
            }
            weights.push(w * mass);
            atoms.push(DensityMatrix::from_matrix(m.hermitian_part()).unwrap());
        }
    }
    Ensemble::new(weights, atoms).unwrap()
}

/// Projector onto the support of `rho`.
pub fn support_projector(rho: &DensityMatrix) -> HermitianMatrix {
    let spec = rho.spectrum();
    let mut m = CMatrix::zeros(rho.dim(), rho.dim());
    for k in 0..rho.rank(1e-9) {
        let v = spec.eigenvector(k);
        m = &m + &CMatrix::outer(&v, &v);
    }
    HermitianMatrix::new(m.hermitian_part()).unwrap()
}

/// Predicates used for mass monotonicity: rank bounds, five faces spanned
/// by supports of `nu`'s atoms, and `nu`'s pure atoms plus random pure states.
pub fn mass_predicates(nu: &Ensemble, rng: &mut impl Rng) -> Vec<MassPredicate> {
    let d = nu.dim();
    let mut out: Vec<MassPredicate> = (1..=d).map(MassPredicate::RankAtMost).collect();
    for _ in 0..5 {
        let a = &nu.atoms()[rng.random_range(0..nu.len())];
        let b = &nu.atoms()[rng.random_range(0..nu.len())];
        let face = if rng.random_bool(0.5) { a.clone() } else { a.mix(b, 0.5).unwrap() };
        out.push(MassPredicate::SupportIn(support_projector(&face)));
    }
    let mut list: Vec<PureState> = nu
        .atoms()
        .iter()
        .filter(|a| a.is_pure())
        .map(|a| PureState::new(a.spectrum().eigenvector(0)).unwrap())
        .collect();
    list.push(random_pure(d, rng));
    out.push(MassPredicate::MemberOf(list));
    out
}
