//! Choquet (convex) order between finite ensembles.
//!
//! `μ ≻ ν` holds for finitely supported measures exactly when there is a
//! row-stochastic transition plan `t_ij` (rows = atoms of ν, columns = atoms
//! of μ) that moves ν's mass onto μ's atoms while keeping every row's
//! barycenter at the corresponding ν atom. Feasibility of that plan is decided
//! by a phase-one simplex over real variables.

pub mod simplex;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::states::{random_hermitian, rng_from_seed, DensityMatrix, Ensemble, PureState};
use simplex::{phase_one, PhaseOneStatus};

/// Barycenters further apart than this (entrywise) are never ordered.
pub const BARYCENTER_TOL: f64 = 1e-7;
/// Phase-one residual at or below which the plan is declared feasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Residuals above this are declared infeasible; in between is ambiguous.
pub const INFEASIBILITY_TOL: f64 = 1e-6;
pub const PLAN_STOCHASTIC_TOL: f64 = 1e-8;
pub const PLAN_BARYCENTER_TOL: f64 = 1e-7;
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Real coordinates of a Hermitian matrix in the orthonormal basis
/// `{E_kk} ∪ {(E_kl+E_lk)/√2} ∪ {i(E_kl-E_lk)/√2}` (k < l, in that order).
pub fn hermitian_coordinates(m: &CMatrix) -> Vec<f64> {
    let d = m.rows();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(m[(k, k)].re);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            out.push(s2 * m[(k, l)].re);
        }
    }
    for k in 0..d {
        for l in (k + 1)..d {
            // Tr(i(E_kl - E_lk) M)/√2 = √2 Im M_kl for Hermitian M
            out.push(s2 * m[(k, l)].im);
        }
    }
    out
}

/// Dilation kernel certifying `μ ≻ ν`: `rows[i][j]` is the share of ν's
/// atom `i` sent to μ's atom `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionPlan {
    pub rows: Vec<Vec<f64>>,
}

/// Largest violations of the plan constraints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanDefects {
    pub min_entry: f64,
    pub row_sum: f64,
    pub marginal: f64,
    pub barycenter: f64,
}

impl PlanDefects {
    pub fn is_valid(&self) -> bool {
        self.min_entry >= 0.0
            && self.row_sum <= PLAN_STOCHASTIC_TOL
            && self.marginal <= PLAN_STOCHASTIC_TOL
            && self.barycenter <= PLAN_BARYCENTER_TOL
    }
}

impl TransitionPlan {
    pub fn defects(&self, mu: &Ensemble, nu: &Ensemble) -> Result<PlanDefects> {
        if self.rows.len() != nu.len() || self.rows.iter().any(|r| r.len() != mu.len()) {
            return Err(Error::DimensionMismatch { expected: nu.len() * mu.len(), got: self.rows.iter().map(Vec::len).sum() });
        }
        let mut d = PlanDefects { min_entry: f64::INFINITY, row_sum: 0.0, marginal: 0.0, barycenter: 0.0 };
        for (i, row) in self.rows.iter().enumerate() {
            d.min_entry = row.iter().copied().fold(d.min_entry, f64::min);
            d.row_sum = d.row_sum.max((row.iter().sum::<f64>() - 1.0).abs());
            let dim = mu.dim();
            let mut bc = CMatrix::zeros(dim, dim);
            for (j, &t) in row.iter().enumerate() {
                bc = &bc + &mu.atoms()[j].matrix().scale(t);
            }
            d.barycenter = d.barycenter.max(bc.max_abs_diff(nu.atoms()[i].matrix()));
        }
        for (j, &p) in mu.weights().iter().enumerate() {
            let m: f64 = self.rows.iter().zip(nu.weights()).map(|(r, q)| q * r[j]).sum();
            d.marginal = d.marginal.max((m - p).abs());
        }
        Ok(d)
    }
}

/// Convex function `ρ ↦ max_j (Tr A_j ρ + b_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxAffine {
    pub pieces: Vec<(HermitianMatrix, f64)>,
}

impl MaxAffine {
    pub fn eval(&self, rho: &DensityMatrix) -> f64 {
        self.pieces
            .iter()
            .map(|(a, b)| a.trace_product(rho.matrix()) + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integral(&self, e: &Ensemble) -> f64 {
        e.average(|rho| self.eval(rho))
    }

    /// Random function with 1 to 5 pieces.
    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        let k = rng.random_range(1..=5);
        let pieces = (0..k)
            .map(|_| (random_hermitian(dim, rng), rng.random_range(-1.0..1.0)))
            .collect();
        MaxAffine { pieces }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStatus {
    Dominates,
    NotDominates,
    NumericallyAmbiguous,
}

#[derive(Clone, Debug)]
pub struct OrderVerdict {
    pub status: OrderStatus,
    pub plan: Option<TransitionPlan>,
    /// Convex function with `∫f dμ < ∫f dν`, when one is known.
    pub violation: Option<MaxAffine>,
    /// Phase-one residual (zero when the LP was skipped).
    pub residual: f64,
}

impl OrderVerdict {
    pub fn dominates(&self) -> bool {
        self.status == OrderStatus::Dominates
    }
}

fn check_dims(mu: &Ensemble, nu: &Ensemble) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    Ok(())
}

/// Decides whether `mu ≻ nu`.
pub fn check_dominates(mu: &Ensemble, nu: &Ensemble) -> Result<OrderVerdict> {
    check_dims(mu, nu)?;
    let bmu = mu.barycenter();
    let bnu = nu.barycenter();
    if bmu.matrix().max_abs_diff(bnu.matrix()) > BARYCENTER_TOL {
        // Tr[(ρ̄ν - ρ̄μ)ρ] is affine, hence convex, and integrates lower under μ.
        let a = bnu.hermitian().sub(bmu.hermitian());
        return Ok(OrderVerdict {
            status: OrderStatus::NotDominates,
            plan: None,
            violation: Some(MaxAffine { pieces: vec![(a, 0.0)] }),
            residual: 0.0,
        });
    }

    let (nr, nc) = (nu.len(), mu.len());
    let d = mu.dim();
    let nvars = nr * nc;
    let mu_coords: Vec<Vec<f64>> = mu.atoms().iter().map(|a| hermitian_coordinates(a.matrix())).collect();
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for i in 0..nr {
        let mut row = vec![0.0; nvars];
        row[i * nc..(i + 1) * nc].fill(1.0);
        a.push(row);
        b.push(1.0);
    }
    for j in 0..nc {
        let mut row = vec![0.0; nvars];
        for (i, &q) in nu.weights().iter().enumerate() {
            row[i * nc + j] = q;
        }
        a.push(row);
        b.push(mu.weights()[j]);
    }
    for (i, atom) in nu.atoms().iter().enumerate() {
        let target = hermitian_coordinates(atom.matrix());
        for (c, &tv) in target.iter().enumerate() {
            let mut row = vec![0.0; nvars];
            for (j, coords) in mu_coords.iter().enumerate() {
                row[i * nc + j] = coords[c];
            }
            a.push(row);
            b.push(tv);
        }
    }
    debug_assert_eq!(a.len(), nr + nc + nr * d * d);
    let cap = 10 * (nvars + a.len());
    let lp = phase_one(&a, &b, nvars, cap);
    if lp.status == PhaseOneStatus::IterationCap {
        return Ok(OrderVerdict { status: OrderStatus::NumericallyAmbiguous, plan: None, violation: None, residual: lp.residual });
    }
    if lp.residual > INFEASIBILITY_TOL {
        return Ok(OrderVerdict { status: OrderStatus::NotDominates, plan: None, violation: None, residual: lp.residual });
    }
    if lp.residual > FEASIBILITY_TOL {
        return Ok(OrderVerdict { status: OrderStatus::NumericallyAmbiguous, plan: None, violation: None, residual: lp.residual });
    }
    let rows: Vec<Vec<f64>> = (0..nr).map(|i| lp.x[i * nc..(i + 1) * nc].to_vec()).collect();
    let plan = TransitionPlan { rows };
    let status = if plan.defects(mu, nu)?.is_valid() { OrderStatus::Dominates } else { OrderStatus::NumericallyAmbiguous };
    Ok(OrderVerdict { status, plan: Some(plan), violation: None, residual: lp.residual })
}

/// Atom filters for [`mass_on`].
#[derive(Clone, Debug)]
pub enum MassPredicate {
    RankAtMost(usize),
    /// Support contained in the range of the projector.
    SupportIn(HermitianMatrix),
    /// Atom is (numerically) one of the listed pure states.
    MemberOf(Vec<PureState>),
}

impl MassPredicate {
    pub fn holds(&self, rho: &DensityMatrix) -> Result<bool> {
        Ok(match self {
            MassPredicate::RankAtMost(n) => rho.rank(RANK_THRESHOLD) <= *n,
            MassPredicate::SupportIn(p) => {
                if p.dim() != rho.dim() {
                    return Err(Error::DimensionMismatch { expected: p.dim(), got: rho.dim() });
                }
                1.0 - p.trace_product(rho.matrix()) <= RANK_THRESHOLD
            }
            MassPredicate::MemberOf(list) => {
                if let Some(s) = list.iter().find(|s| s.dim() != rho.dim()) {
                    return Err(Error::DimensionMismatch { expected: s.dim(), got: rho.dim() });
                }
                rho.is_pure() && list.iter().any(|s| rho.hermitian().expectation(s.amplitudes()) >= 1.0 - RANK_THRESHOLD)
            }
        })
    }
}

/// Total weight of atoms satisfying `predicate`.
pub fn mass_on(e: &Ensemble, predicate: &MassPredicate) -> Result<f64> {
    let mut m = 0.0;
    for (w, a) in e.iter() {
        if predicate.holds(a)? {
            m += w;
        }
    }
    Ok(m.min(1.0))
}

#[derive(Clone, Debug)]
pub enum NecessaryTest {
    Consistent,
    Violated { witness: MaxAffine, gap: f64 },
}

impl NecessaryTest {
    pub fn is_consistent(&self) -> bool {
        matches!(self, NecessaryTest::Consistent)
    }
}

/// Falsification test for `mu ≻ nu`: samples random max-of-affine convex
/// functions and looks for one with `∫f dμ < ∫f dν - 1e-9`.
pub fn order_necessary_test(mu: &Ensemble, nu: &Ensemble, trials: usize, seed: u64) -> Result<NecessaryTest> {
    check_dims(mu, nu)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let f = MaxAffine::random(mu.dim(), &mut rng);
        let gap = f.integral(nu) - f.integral(mu);
        if gap > 1e-9 {
            return Ok(NecessaryTest::Violated { witness: f, gap });
        }
    }
    Ok(NecessaryTest::Consistent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{refine_to_pure, sample_ensemble};

    fn ket(k: usize) -> DensityMatrix {
        PureState::basis(2, k).to_density()
    }

    fn spread() -> Ensemble {
        Ensemble::new(vec![0.5, 0.5], vec![ket(0), ket(1)]).unwrap()
    }

    fn center() -> Ensemble {
        Ensemble::point_mass(DensityMatrix::maximally_mixed(2))
    }

    #[test]
    fn coordinates_are_orthonormal_expansion() {
        let e = sample_ensemble(3, 2, 3).unwrap();
        let (x, y) = (e.atoms()[0].matrix(), e.atoms()[1].matrix());
        let hs: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (x[(i, j)] * y[(j, i)]).re).sum();
        let dot: f64 = hermitian_coordinates(x).iter().zip(hermitian_coordinates(y)).map(|(a, b)| a * b).sum();
        assert!((hs - dot).abs() < 1e-14);
    }

    #[test]
    fn definitional_dilation() {
        let v = check_dominates(&spread(), &center()).unwrap();
        assert_eq!(v.status, OrderStatus::Dominates);
        let plan = v.plan.unwrap();
        assert_eq!(plan.rows.len(), 1);
        assert!((plan.rows[0][0] - 0.5).abs() < 1e-12);
        assert!((plan.rows[0][1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reversed_pair_not_dominating() {
        let v = check_dominates(&center(), &spread()).unwrap();
        assert_eq!(v.status, OrderStatus::NotDominates);
        let rank1 = MassPredicate::RankAtMost(1);
        assert!(mass_on(&center(), &rank1).unwrap() < mass_on(&spread(), &rank1).unwrap());
    }

    #[test]
    fn reflexive_identity_plan() {
        let v = check_dominates(&spread(), &spread()).unwrap();
        assert!(v.dominates());
        let plan = v.plan.unwrap();
        assert!((plan.rows[0][0] - 1.0).abs() < 1e-12 && plan.rows[0][1].abs() < 1e-12);
        assert!((plan.rows[1][1] - 1.0).abs() < 1e-12 && plan.rows[1][0].abs() < 1e-12);
    }

    #[test]
    fn different_barycenters_prescreened() {
        let nu = Ensemble::point_mass(ket(0));
        let v = check_dominates(&spread(), &nu).unwrap();
        assert_eq!(v.status, OrderStatus::NotDominates);
        let w = v.violation.unwrap();
        assert!(w.integral(&spread()) < w.integral(&nu));
    }

    #[test]
    fn refinement_dominates() {
        for seed in 0..30 {
            let e = sample_ensemble(3, 3, seed).unwrap();
            let r = refine_to_pure(&e);
            let v = check_dominates(&r, &e).unwrap();
            assert!(v.dominates(), "seed {seed}: residual {}", v.residual);
            assert!(v.plan.unwrap().defects(&r, &e).unwrap().is_valid());
        }
    }

    #[test]
    fn mass_examples() {
        let r = refine_to_pure(&sample_ensemble(3, 3, 1).unwrap());
        assert!((mass_on(&r, &MassPredicate::RankAtMost(1)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mass_on(&center(), &MassPredicate::RankAtMost(1)).unwrap(), 0.0);
        let mixed = Ensemble::new(vec![0.3, 0.7], vec![ket(0), DensityMatrix::maximally_mixed(2)]).unwrap();
        assert!((mass_on(&mixed, &MassPredicate::RankAtMost(1)).unwrap() - 0.3).abs() < 1e-15);
        let p0 = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!((mass_on(&mixed, &MassPredicate::SupportIn(p0)).unwrap() - 0.3).abs() < 1e-15);
        let list = MassPredicate::MemberOf(vec![PureState::basis(2, 1)]);
        assert_eq!(mass_on(&spread(), &list).unwrap(), 0.5);
    }

    #[test]
    fn necessary_test_examples() {
        assert!(order_necessary_test(&spread(), &center(), 1000, 1).unwrap().is_consistent());
        assert!(order_necessary_test(&spread(), &spread(), 1000, 1).unwrap().is_consistent());
        match order_necessary_test(&center(), &spread(), 1000, 1).unwrap() {
            NecessaryTest::Violated { witness, gap } => {
                assert!(gap > 1e-9);
                assert!(witness.integral(&center()) < witness.integral(&spread()));
            }
            NecessaryTest::Consistent => panic!("reversed pair should be falsified"),
        }
        // λ_max is a max of affine functionals and separates the pair
        let lmax = MaxAffine {
            pieces: vec![(HermitianMatrix::from_real_diagonal(&[1.0, 0.0]), 0.0), (HermitianMatrix::from_real_diagonal(&[0.0, 1.0]), 0.0)],
        };
        assert!((lmax.integral(&center()) - 0.5).abs() < 1e-15);
        assert!((lmax.integral(&spread()) - 1.0).abs() < 1e-15);
    }
}
