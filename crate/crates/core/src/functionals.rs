//! Scalar functionals on states: von Neumann entropy and its truncated
//! variant, Ky Fan sums, the monotone approximators of characteristic
//! functions, channel output entropy and the purity-gap function.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, reduced_from_amplitudes, CMatrix, HermitianMatrix, Side, C64,
};
use crate::states::{DensityMatrix, PureState};

/// Values of `g` this close to 1 are treated as exactly 1.
pub const G_ONE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" | "E" => Ok(LogBase::E),
            other => Err(Error::InvalidParameter(format!("log base must be 2 or e, got {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    AllStates,
    PureStates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Concave,
    Neither,
}

/// Declared shape of a functional. `bound` is an upper bound on `|f|` when
/// the functional is bounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Traits {
    pub convexity: Convexity,
    pub bound: Option<f64>,
}

/// A real-valued function on states (or on pure states only).
pub trait StateFunctional: Send + Sync {
    fn name(&self) -> String;

    fn domain(&self) -> Domain {
        Domain::AllStates
    }

    fn traits(&self) -> Traits;

    /// Hilbert-space dimension the functional is tied to, if any.
    fn dim(&self) -> Option<usize> {
        None
    }

    fn eval(&self, rho: &DensityMatrix) -> Result<f64>;

    /// Evaluation on the pure state with unit amplitude vector `psi`.
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        let m = CMatrix::outer(psi, psi);
        self.eval(&DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(m)))
    }
}

impl fmt::Debug for dyn StateFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateFunctional({})", self.name())
    }
}

fn entropy_of_spectrum(eigs: &[f64], base: LogBase) -> f64 {
    let s: f64 = eigs.iter().filter(|&&l| l > 0.0).map(|&l| -l * base.log(l)).sum();
    s.max(0.0)
}

/// `-Σ λ_i log λ_i + s log s` over the `n` largest of `eigs` (sorted
/// descending), `s` their sum. Lies in `[0, log n]`.
pub fn truncated_entropy_of_spectrum(eigs: &[f64], n: usize, base: LogBase) -> f64 {
    let top = &eigs[..n.min(eigs.len())];
    let s: f64 = top.iter().map(|l| l.max(0.0)).sum();
    if s <= 0.0 {
        return 0.0;
    }
    let h = entropy_of_spectrum(top, base) + s * base.log(s);
    h.clamp(0.0, base.log(n as f64))
}

/// Von Neumann entropy `-Σ λ log λ`, with `0 log 0 = 0`.
pub fn entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    entropy_of_spectrum(rho.eigenvalues(), base)
}

fn bipartite_dims(omega: &DensityMatrix) -> Result<(usize, usize)> {
    omega
        .dims()
        .ok_or_else(|| Error::InvalidParameter("state carries no bipartite dims".into()))
}

/// Truncated entropy `H_n` of the keep-A reduced state of `omega`.
pub fn truncated_entropy(omega: &DensityMatrix, n: usize, base: LogBase) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let dims = bipartite_dims(omega)?;
    let red = partial_trace(omega.hermitian(), dims, Side::A)?;
    Ok(truncated_entropy_of_spectrum(&hermitian_eigenvalues(red.matrix()), n, base))
}

/// Sum of the `n` largest eigenvalues.
pub fn ky_fan(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if n < 1 || n > rho.dim() {
        return Err(Error::InvalidParameter(format!("Ky Fan index {n} outside 1..={}", rho.dim())));
    }
    Ok(rho.eigenvalues()[..n].iter().sum::<f64>().min(1.0))
}

/// `Tr ρ²` for mixed states, `0` for pure ones (second eigenvalue ≤ 1e-9).
pub fn purity_gap(rho: &DensityMatrix) -> f64 {
    if rho.is_pure() {
        0.0
    } else {
        rho.purity()
    }
}

/// Which characteristic function the approximators converge to.
#[derive(Clone, Debug, PartialEq)]
pub enum CharFnCase {
    /// `g(ρ) = max_i <φ_i|ρ|φ_i>` over a finite list of pure states.
    PureSet(Vec<PureState>),
    /// `g(ρ) = Tr P₀ρ` for an orthogonal projector `P₀`.
    Face(HermitianMatrix),
    /// `g(ρ)` = sum of the `k` largest eigenvalues.
    RankAtMost(usize),
}

impl CharFnCase {
    pub fn pure_set(states: Vec<PureState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("pure-state list is empty".into()));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
        }
        Ok(CharFnCase::PureSet(states))
    }

    pub fn face(projector: HermitianMatrix) -> Result<Self> {
        let p = projector.matrix();
        let defect = p.matmul(p).max_abs_diff(p);
        if defect > 1e-9 {
            return Err(Error::InvalidParameter(format!("face operator is not a projector (|P²-P| = {defect:.3e})")));
        }
        Ok(CharFnCase::Face(projector))
    }

    pub fn rank_at_most(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("rank bound must be at least 1".into()));
        }
        Ok(CharFnCase::RankAtMost(k))
    }

    pub fn label(&self) -> &'static str {
        match self {
            CharFnCase::PureSet(_) => "set",
            CharFnCase::Face(_) => "face",
            CharFnCase::RankAtMost(_) => "rank",
        }
    }

    fn required_dim(&self) -> Option<usize> {
        match self {
            CharFnCase::PureSet(s) => Some(s[0].dim()),
            CharFnCase::Face(p) => Some(p.dim()),
            CharFnCase::RankAtMost(_) => None,
        }
    }

    /// The convex function `g` whose level set `g = 1` is approximated,
    /// clamped to `[0, 1]` and snapped to 1 within [`G_ONE_TOL`].
    pub fn g(&self, rho: &DensityMatrix) -> Result<f64> {
        if let Some(d) = self.required_dim() {
            if d != rho.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: rho.dim() });
            }
        }
        let raw = match self {
            CharFnCase::PureSet(states) => states
                .iter()
                .map(|s| rho.hermitian().expectation(s.amplitudes()))
                .fold(f64::NEG_INFINITY, f64::max),
            CharFnCase::Face(p) => rho.hermitian().trace_product(p.matrix()),
            CharFnCase::RankAtMost(k) => {
                let k = (*k).min(rho.dim());
                ky_fan(rho, k)?
            }
        };
        let g = raw.clamp(0.0, 1.0);
        Ok(if g >= 1.0 - G_ONE_TOL { 1.0 } else { g })
    }
}

/// `f_n(ρ) = 1 - (1 - g(ρ))^{1/n}`.
pub fn approx_char_fn(case: &CharFnCase, n: u32, rho: &DensityMatrix) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("approximator index n must be at least 1".into()));
    }
    let g = case.g(rho)?;
    Ok(approx_from_g(g, n))
}

fn approx_from_g(g: f64, n: u32) -> f64 {
    if g >= 1.0 {
        1.0
    } else {
        1.0 - (1.0 - g).powf(1.0 / n as f64)
    }
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    /// Each operator must be `output_dim × input_dim`, and `Σ K†K = I`.
    pub fn new(input_dim: usize, output_dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one Kraus operator".into()));
        }
        let mut acc = CMatrix::zeros(input_dim, input_dim);
        for k in &kraus {
            if k.rows() != output_dim || k.cols() != input_dim {
                return Err(Error::DimensionMismatch { expected: output_dim * input_dim, got: k.rows() * k.cols() });
            }
            acc = &acc + &k.adjoint().matmul(k);
        }
        let defect = acc.max_abs_diff(&CMatrix::identity(input_dim));
        if defect > 1e-9 {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(KrausChannel { input_dim, output_dim, kraus })
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel { input_dim: d, output_dim: d, kraus: vec![CMatrix::identity(d)] }
    }

    /// `ρ ↦ Tr_B ρ` on `C^{dA} ⊗ C^{dB}`.
    pub fn partial_trace_b(da: usize, db: usize) -> Self {
        let kraus = (0..db)
            .map(|k| CMatrix::from_fn(da, da * db, |i, j| if j == i * db + k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
            .collect();
        KrausChannel { input_dim: da * db, output_dim: da, kraus }
    }

    /// `ρ ↦ I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let kraus = (0..d * d)
            .map(|idx| {
                let (i, j) = (idx / d, idx % d);
                let mut k = CMatrix::zeros(d, d);
                k[(i, j)] = C64::new(s, 0.0);
                k
            })
            .collect();
        KrausChannel { input_dim: d, output_dim: d, kraus }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            acc = &acc + &k.matmul(rho).matmul(&k.adjoint());
        }
        acc
    }
}

/// `Σ K_m ρ K_m†`.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != channel.input_dim {
        return Err(Error::DimensionMismatch { expected: channel.input_dim, got: rho.dim() });
    }
    let out = channel.apply_matrix(rho.matrix());
    Ok(DensityMatrix::from_hermitian_unchecked(HermitianMatrix::from_hermitian_unchecked(out)))
}

pub fn output_entropy(channel: &KrausChannel, rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(entropy(&apply_channel(channel, rho)?, base))
}

// ---------------------------------------------------------------------------
// StateFunctional implementations

#[derive(Clone, Debug)]
pub struct Entropy {
    pub dim: usize,
    pub base: LogBase,
}

impl StateFunctional for Entropy {
    fn name(&self) -> String {
        "entropy".into()
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Concave, bound: Some(self.base.log(self.dim as f64)) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(entropy(rho, self.base))
    }
    fn eval_pure(&self, _psi: &[C64]) -> Result<f64> {
        Ok(0.0)
    }
}

/// Entropy of the keep-A partial trace.
#[derive(Clone, Debug)]
pub struct ReducedEntropy {
    pub dims: (usize, usize),
    pub base: LogBase,
}

impl StateFunctional for ReducedEntropy {
    fn name(&self) -> String {
        "entropyA".into()
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Neither, bound: Some(self.base.log(self.dims.0.min(self.dims.1) as f64)) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.dims.0 * self.dims.1)
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        let red = partial_trace(rho.hermitian(), self.dims, Side::A)?;
        Ok(entropy_of_spectrum(&hermitian_eigenvalues(red.matrix()), self.base))
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        check_len(psi, self.dims.0 * self.dims.1)?;
        let red = reduced_from_amplitudes(psi, self.dims.0, self.dims.1);
        Ok(entropy_of_spectrum(&hermitian_eigenvalues(&red), self.base))
    }
}

/// `H_n` of the keep-A partial trace.
#[derive(Clone, Debug)]
pub struct TruncatedEntropy {
    pub dims: (usize, usize),
    pub n: usize,
    pub base: LogBase,
}

impl TruncatedEntropy {
    pub fn new(dims: (usize, usize), n: usize, base: LogBase) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(TruncatedEntropy { dims, n, base })
    }
}

impl StateFunctional for TruncatedEntropy {
    fn name(&self) -> String {
        format!("hn:{}", self.n)
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Neither, bound: Some(self.base.log(self.n as f64)) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.dims.0 * self.dims.1)
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        let red = partial_trace(rho.hermitian(), self.dims, Side::A)?;
        Ok(truncated_entropy_of_spectrum(&hermitian_eigenvalues(red.matrix()), self.n, self.base))
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        check_len(psi, self.dims.0 * self.dims.1)?;
        let red = reduced_from_amplitudes(psi, self.dims.0, self.dims.1);
        Ok(truncated_entropy_of_spectrum(&hermitian_eigenvalues(&red), self.n, self.base))
    }
}

#[derive(Clone, Debug)]
pub struct KyFan {
    pub n: usize,
}

impl StateFunctional for KyFan {
    fn name(&self) -> String {
        format!("kyfan:{}", self.n)
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Convex, bound: Some(1.0) }
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        ky_fan(rho, self.n)
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        if self.n < 1 || self.n > psi.len() {
            return Err(Error::InvalidParameter(format!("Ky Fan index {} outside 1..={}", self.n, psi.len())));
        }
        Ok(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct CharFnApprox {
    pub case: CharFnCase,
    pub n: u32,
}

impl StateFunctional for CharFnApprox {
    fn name(&self) -> String {
        format!("charfn:{}:{}", self.case.label(), self.n)
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Convex, bound: Some(1.0) }
    }
    fn dim(&self) -> Option<usize> {
        self.case.required_dim()
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        approx_char_fn(&self.case, self.n, rho)
    }
}

#[derive(Clone, Debug)]
pub struct ChannelOutputEntropy {
    pub channel: KrausChannel,
    pub base: LogBase,
}

impl StateFunctional for ChannelOutputEntropy {
    fn name(&self) -> String {
        "channel".into()
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Neither, bound: Some(self.base.log(self.channel.output_dim as f64)) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.channel.input_dim)
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        output_entropy(&self.channel, rho, self.base)
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        check_len(psi, self.channel.input_dim)?;
        let out = self.channel.apply_matrix(&CMatrix::outer(psi, psi));
        Ok(entropy_of_spectrum(&hermitian_eigenvalues(&out.hermitian_part()), self.base))
    }
}

#[derive(Clone, Debug, Default)]
pub struct PurityGap;

impl StateFunctional for PurityGap {
    fn name(&self) -> String {
        "purity-gap".into()
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Neither, bound: Some(1.0) }
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(purity_gap(rho))
    }
    fn eval_pure(&self, _psi: &[C64]) -> Result<f64> {
        Ok(0.0)
    }
}

/// `ρ ↦ Tr Aρ`.
#[derive(Clone, Debug)]
pub struct Affine {
    pub a: HermitianMatrix,
}

impl StateFunctional for Affine {
    fn name(&self) -> String {
        "affine".into()
    }
    fn traits(&self) -> Traits {
        Traits { convexity: Convexity::Convex, bound: Some(crate::linalg::op_norm(&self.a)) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.a.dim())
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        check_dim(self.a.dim(), rho.dim())?;
        Ok(self.a.trace_product(rho.matrix()))
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        check_len(psi, self.a.dim())?;
        Ok(self.a.expectation(psi))
    }
}

/// `ψ ↦ <ψ|A|ψ>²`, defined on pure states only.
#[derive(Clone, Debug)]
pub struct QuarticExpectation {
    pub a: HermitianMatrix,
}

impl StateFunctional for QuarticExpectation {
    fn name(&self) -> String {
        "quartic".into()
    }
    fn domain(&self) -> Domain {
        Domain::PureStates
    }
    fn traits(&self) -> Traits {
        let b = crate::linalg::op_norm(&self.a);
        Traits { convexity: Convexity::Neither, bound: Some(b * b) }
    }
    fn dim(&self) -> Option<usize> {
        Some(self.a.dim())
    }
    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        if !rho.is_pure() {
            return Err(Error::Unsupported("quartic functional is defined on pure states only".into()));
        }
        self.eval_pure(&rho.spectrum().eigenvector(0))
    }
    fn eval_pure(&self, psi: &[C64]) -> Result<f64> {
        check_len(psi, self.a.dim())?;
        let e = self.a.expectation(psi);
        Ok(e * e)
    }
}

fn check_len(psi: &[C64], d: usize) -> Result<()> {
    if psi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.len() });
    }
    Ok(())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
