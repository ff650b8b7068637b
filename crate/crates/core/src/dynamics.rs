//! Dynamics models and time-sampled trajectories.
//!
//! Two kinds of evolution are supported: closed evolution under a
//! time-independent Hamiltonian, and open evolution through a time-dependent
//! family of Kraus operators. The built-in families are the single-qubit
//! depolarizing channel and two independent amplitude-damping reservoirs
//! acting on a pair of qubits.

use std::fmt;
use std::io::{self, BufRead};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    eigh, kron, trace_norm, unitary_propagator, ComplexMatrix, HermitianEigensystem, LinalgError,
};
use crate::states::{DensityMatrix, StateError};

/// Tolerance on Σ K†K = I.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Default number of samples on [0, τ].
pub const DEFAULT_STEPS: usize = 1001;
/// Relative step (in units of τ) for finite-difference Kraus derivatives.
pub const FD_REL_STEP: f64 = 1e-5;
/// Half-width around s = 1/2 where the critical-damping form is used.
pub const CRITICAL_S_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("Kraus operators are not trace preserving at t = {t} (deviation {deviation:.3e})")]
    CompletenessViolation { t: f64, deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Kraus table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn check_dim(left: usize, right: usize) -> Result<(), DynamicsError> {
    if left == right {
        Ok(())
    } else {
        Err(DynamicsError::DimMismatch { left, right })
    }
}

/// Time-independent Hamiltonian (ħ = 1).
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    h: ComplexMatrix,
    spectrum: HermitianEigensystem,
    field: Option<[f64; 3]>,
}

impl HamiltonianModel {
    pub fn new(h: ComplexMatrix) -> Result<Self, DynamicsError> {
        let spectrum = eigh(&h)?;
        Ok(Self {
            h: h.hermitian_part(),
            spectrum,
            field: None,
        })
    }

    /// H = n⃗·σ⃗ on a single qubit.
    pub fn qubit(n: [f64; 3]) -> Result<Self, DynamicsError> {
        if n.iter().any(|c| !c.is_finite()) {
            return Err(DynamicsError::InvalidParameter("field components must be finite".into()));
        }
        let h = &(&ComplexMatrix::pauli_x().scale_real(n[0])
            + &ComplexMatrix::pauli_y().scale_real(n[1]))
            + &ComplexMatrix::pauli_z().scale_real(n[2]);
        let mut model = Self::new(h)?;
        model.field = Some(n);
        Ok(model)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    /// The field vector when built with [`HamiltonianModel::qubit`].
    pub fn field(&self) -> Option<[f64; 3]> {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// exp(−i t H).
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        unitary_propagator(&self.spectrum, t)
    }

    /// −i[H, ρ].
    pub fn generator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.h.commutator(rho).scale(Complex64::new(0.0, -1.0))
    }
}

/// Energy uncertainty ΔH = sqrt(Tr(ρH²) − Tr(ρH)²).
pub fn variance_h(h: &HamiltonianModel, rho0: &DensityMatrix) -> Result<f64, DynamicsError> {
    check_dim(h.dim(), rho0.dim())?;
    let hm = h.matrix();
    let mean = rho0.expectation(hm)?;
    let second = rho0.expectation(&(hm * hm))?;
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// −Tr([ρ, H]²)/4, a coherence measure of ρ in the energy eigenbasis.
pub fn coherence_measure(h: &HamiltonianModel, rho0: &DensityMatrix) -> Result<f64, DynamicsError> {
    check_dim(h.dim(), rho0.dim())?;
    let c = rho0.matrix().commutator(h.matrix());
    let tr = c.trace_product(&c)?;
    Ok((-0.25 * tr.re).max(0.0))
}

/// Time-dependent Kraus family {K_l(t)}.
///
/// Families that know their derivatives should return them from
/// [`KrausFamily::derivatives`]; otherwise central differences are used.
pub trait KrausFamily: Send + Sync {
    fn dim(&self) -> usize;

    fn operators(&self, t: f64) -> Vec<ComplexMatrix>;

    fn derivatives(&self, _t: f64) -> Option<Vec<ComplexMatrix>> {
        None
    }

    fn name(&self) -> &str {
        "kraus"
    }

    /// Time at which velocity-related products are evaluated for a sample at
    /// `t`. Families whose derivatives are singular at the origin move the
    /// evaluation slightly inside, where the products reach their limits.
    fn rate_time(&self, t: f64) -> f64 {
        t
    }
}

/// Derivatives of the Kraus operators at `t`, analytic when available and
/// otherwise by second-order finite differences with step `h` (one-sided near t = 0).
pub fn kraus_derivatives(family: &dyn KrausFamily, t: f64, h: f64) -> Vec<ComplexMatrix> {
    if let Some(d) = family.derivatives(t) {
        return d;
    }
    if t >= h {
        let plus = family.operators(t + h);
        let minus = family.operators(t - h);
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| (p - m).scale_real(0.5 / h))
            .collect()
    } else {
        let f0 = family.operators(t);
        let f1 = family.operators(t + h);
        let f2 = family.operators(t + 2.0 * h);
        f0.iter()
            .zip(&f1)
            .zip(&f2)
            .map(|((a, b), c)| {
                (&(&b.scale_real(4.0) - &a.scale_real(3.0)) - c).scale_real(0.5 / h)
            })
            .collect()
    }
}

/// max-entry deviation of Σ K†K from the identity.
pub fn completeness_deviation(ops: &[ComplexMatrix]) -> f64 {
    let n = ops[0].dim();
    let mut sum = ComplexMatrix::zeros(n);
    for k in ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    (&sum - &ComplexMatrix::identity(n)).max_abs()
}

fn apply_kraus(ops: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for k in ops {
        out = &out + &(&(k * rho) * &k.adjoint());
    }
    out
}

/// Σ_l (dK_l ρ K_l† + K_l ρ dK_l†).
fn kraus_rate(ops: &[ComplexMatrix], dops: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for (k, dk) in ops.iter().zip(dops) {
        let half = &(dk * rho) * &k.adjoint();
        out = &(&out + &half) + &half.adjoint();
    }
    out
}

/// The norms ‖K_l ρ₀ dK_l†‖₁ of each Kraus contribution to the state velocity.
pub fn kraus_speed_terms(
    family: &dyn KrausFamily,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<Vec<f64>, DynamicsError> {
    check_dim(family.dim(), rho0.dim())?;
    let tr = family.rate_time(t);
    let ops = family.operators(tr);
    let dops = kraus_derivatives(family, tr, FD_REL_STEP * tr.max(1.0));
    speed_terms_from(&ops, &dops, rho0.matrix())
}

fn speed_terms_from(
    ops: &[ComplexMatrix],
    dops: &[ComplexMatrix],
    rho0: &ComplexMatrix,
) -> Result<Vec<f64>, DynamicsError> {
    ops.iter()
        .zip(dops)
        .map(|(k, dk)| Ok(trace_norm(&(&(k * rho0) * &dk.adjoint()))?))
        .collect()
}

/// Time-sampled evolution on a uniform grid over [0, τ].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// dρ_t/dt at each sample.
    pub rates: Vec<ComplexMatrix>,
    /// ‖dρ_t/dt‖₁ at each sample.
    pub speeds: Vec<f64>,
    pub kmins: Vec<f64>,
    /// Σ_l ‖K_l ρ₀ dK_l†‖₁ at each sample, for Kraus evolutions.
    pub kraus_terms: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn uniform_grid(tau: f64, n_steps: usize) -> Result<Vec<f64>, DynamicsError> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DynamicsError::InvalidParameter(format!("horizon must be finite and >= 0, got {tau}")));
    }
    if n_steps < 2 {
        return Err(DynamicsError::InvalidParameter("at least two time samples are required".into()));
    }
    let last = (n_steps - 1) as f64;
    Ok((0..n_steps)
        .map(|i| if i + 1 == n_steps { tau } else { tau * i as f64 / last })
        .collect())
}

pub fn evolve_unitary(
    h: &HamiltonianModel,
    rho0: &DensityMatrix,
    tau: f64,
    n_steps: usize,
) -> Result<Trajectory, DynamicsError> {
    check_dim(h.dim(), rho0.dim())?;
    let times = uniform_grid(tau, n_steps)?;
    let mut states = Vec::with_capacity(n_steps);
    let mut rates = Vec::with_capacity(n_steps);
    let mut speeds = Vec::with_capacity(n_steps);
    let mut kmins = Vec::with_capacity(n_steps);
    for &t in &times {
        let u = h.propagator(t);
        let rho_t = DensityMatrix::from_channel_output(&(&u * rho0.matrix()) * &u.adjoint())?;
        let rate = h.generator(rho_t.matrix());
        speeds.push(trace_norm(&rate.hermitian_part())?);
        kmins.push(rho_t.k_min());
        rates.push(rate);
        states.push(rho_t);
    }
    Ok(Trajectory {
        times,
        states,
        rates,
        speeds,
        kmins,
        kraus_terms: None,
    })
}

pub fn evolve_kraus(
    family: &dyn KrausFamily,
    rho0: &DensityMatrix,
    tau: f64,
    n_steps: usize,
) -> Result<Trajectory, DynamicsError> {
    check_dim(family.dim(), rho0.dim())?;
    let times = uniform_grid(tau, n_steps)?;
    let fd_step = FD_REL_STEP * if tau > 0.0 { tau } else { 1.0 };
    let mut states = Vec::with_capacity(n_steps);
    let mut rates = Vec::with_capacity(n_steps);
    let mut speeds = Vec::with_capacity(n_steps);
    let mut kmins = Vec::with_capacity(n_steps);
    let mut terms = Vec::with_capacity(n_steps);
    for &t in &times {
        let ops = family.operators(t);
        let deviation = completeness_deviation(&ops);
        if deviation > COMPLETENESS_TOL {
            return Err(DynamicsError::CompletenessViolation { t, deviation });
        }
        let rho_t = DensityMatrix::from_channel_output(apply_kraus(&ops, rho0.matrix()))?;
        let tr = family.rate_time(t);
        let rate_ops = if tr == t { ops } else { family.operators(tr) };
        let dops = kraus_derivatives(family, tr, fd_step);
        let rate = kraus_rate(&rate_ops, &dops, rho0.matrix());
        speeds.push(trace_norm(&rate.hermitian_part())?);
        terms.push(speed_terms_from(&rate_ops, &dops, rho0.matrix())?.iter().sum());
        kmins.push(rho_t.k_min());
        rates.push(rate);
        states.push(rho_t);
    }
    Ok(Trajectory {
        times,
        states,
        rates,
        speeds,
        kmins,
        kraus_terms: Some(terms),
    })
}

/// Either kind of evolution, for callers that pick the model at run time.
#[derive(Clone)]
pub enum DynamicsModel {
    Unitary(HamiltonianModel),
    Kraus(Arc<dyn KrausFamily>),
}

impl fmt::Debug for DynamicsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unitary(h) => f.debug_tuple("Unitary").field(h).finish(),
            Self::Kraus(k) => f.debug_tuple("Kraus").field(&k.name()).finish(),
        }
    }
}

impl DynamicsModel {
    pub fn dim(&self) -> usize {
        match self {
            Self::Unitary(h) => h.dim(),
            Self::Kraus(k) => k.dim(),
        }
    }

    pub fn evolve(&self, rho0: &DensityMatrix, tau: f64, n_steps: usize) -> Result<Trajectory, DynamicsError> {
        match self {
            Self::Unitary(h) => evolve_unitary(h, rho0, tau, n_steps),
            Self::Kraus(k) => evolve_kraus(k.as_ref(), rho0, tau, n_steps),
        }
    }
}

/// Single-qubit depolarizing channel with rate Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingParams {
    pub gamma: f64,
}

impl DepolarizingParams {
    pub fn new(gamma: f64) -> Result<Self, DynamicsError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!("damping rate must be > 0, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    /// Times below this are treated as this value when differentiating.
    pub fn t_floor(&self) -> f64 {
        1e-9 / self.gamma
    }
}

#[derive(Debug, Clone)]
pub struct Depolarizing {
    params: DepolarizingParams,
    paulis: [ComplexMatrix; 3],
}

pub fn depolarizing_family(p: DepolarizingParams) -> Depolarizing {
    Depolarizing {
        params: p,
        paulis: [ComplexMatrix::pauli_x(), ComplexMatrix::pauli_y(), ComplexMatrix::pauli_z()],
    }
}

impl Depolarizing {
    pub fn params(&self) -> DepolarizingParams {
        self.params
    }

    fn assemble(&self, identity_coef: f64, pauli_coef: f64) -> Vec<ComplexMatrix> {
        let mut ops = vec![ComplexMatrix::identity(2).scale_real(identity_coef)];
        ops.extend(self.paulis.iter().map(|s| s.scale_real(pauli_coef)));
        ops
    }
}

impl KrausFamily for Depolarizing {
    fn dim(&self) -> usize {
        2
    }

    fn operators(&self, t: f64) -> Vec<ComplexMatrix> {
        let g = self.params.gamma;
        let e = (-g * t).exp();
        let lost = -(-g * t).exp_m1();
        self.assemble(0.5 * (1.0 + 3.0 * e).sqrt(), 0.5 * lost.sqrt())
    }

    fn derivatives(&self, t: f64) -> Option<Vec<ComplexMatrix>> {
        let g = self.params.gamma;
        let e = (-g * t).exp();
        let lost = -(-g * t).exp_m1();
        Some(self.assemble(
            -0.75 * g * e / (1.0 + 3.0 * e).sqrt(),
            0.25 * g * e / lost.sqrt(),
        ))
    }

    fn name(&self) -> &str {
        "depolarizing"
    }

    // The Pauli-component derivative diverges like t^{-1/2} at the origin while
    // the products K ρ dK† stay finite; at t_floor they sit at their limits.
    fn rate_time(&self, t: f64) -> f64 {
        t.max(self.params.t_floor())
    }
}

/// Regime of the amplitude-damping reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Markovian,
    NonMarkovian,
}

/// Amplitude damping with spectral width λ and coupling parameter s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeDampingParams {
    pub lambda: f64,
    pub s: f64,
}

impl AmplitudeDampingParams {
    pub fn new(lambda: f64, s: f64) -> Result<Self, DynamicsError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!("spectral width must be > 0, got {lambda}")));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!("coupling parameter must be >= 0, got {s}")));
        }
        Ok(Self { lambda, s })
    }

    pub fn regime(&self) -> Regime {
        if self.s <= 0.5 {
            Regime::Markovian
        } else {
            Regime::NonMarkovian
        }
    }

    /// Decoherence amplitude γ_t.
    pub fn gamma(&self, t: f64) -> f64 {
        self.gamma_and_rate(t).0
    }

    /// (γ_t, dγ_t/dt).
    pub fn gamma_and_rate(&self, t: f64) -> (f64, f64) {
        let (lambda, s) = (self.lambda, self.s);
        if s == 0.0 {
            return (1.0, 0.0);
        }
        let x = 0.5 * lambda * t;
        let damp = (-x).exp();
        if (s - 0.5).abs() < CRITICAL_S_TOL {
            return (damp * (1.0 + x), -0.5 * lambda * x * damp);
        }
        if s < 0.5 {
            let b = (1.0 - 2.0 * s).sqrt();
            let (sh, ch) = ((b * x).sinh(), (b * x).cosh());
            (damp * (ch + sh / b), -(lambda * s / b) * damp * sh)
        } else {
            let w = (2.0 * s - 1.0).sqrt();
            let (sn, cs) = (w * x).sin_cos();
            (damp * (cs + sn / w), -(lambda * s / w) * damp * sn)
        }
    }

    /// 1 − γ_t, accurate near t = 0 where γ_t is close to one.
    pub fn one_minus_gamma(&self, t: f64) -> f64 {
        let u = self.lambda * t;
        if self.s == 0.0 {
            return 0.0;
        }
        if u > 0.5 {
            return 1.0 - self.gamma(t);
        }
        // Taylor series of γ in u = λt from γ'' + γ' + (s/2)γ = 0, γ(0) = 1, γ'(0) = 0.
        let half_s = 0.5 * self.s;
        let (mut c_prev, mut c_cur) = (1.0, 0.0);
        let mut upow = u;
        let mut total = 0.0;
        let mut last_term = f64::INFINITY;
        for n in 0..60 {
            let next = -((n as f64 + 1.0) * c_cur + half_s * c_prev) / ((n as f64 + 2.0) * (n as f64 + 1.0));
            upow *= u;
            let term = next * upow;
            total += term;
            // Individual coefficients can vanish (s = 2 kills the u^4 term),
            // so require two consecutive negligible terms.
            if term.abs().max(last_term.abs()) <= 1e-18 * total.abs() {
                break;
            }
            last_term = term;
            c_prev = c_cur;
            c_cur = next;
        }
        -total
    }

    /// (κ_t, dκ_t/dt) with κ_t = sqrt(1 − γ_t²).
    pub fn kappa_and_rate(&self, t: f64) -> (f64, f64) {
        let (g, dg) = self.gamma_and_rate(t);
        let omg = self.one_minus_gamma(t);
        let k2 = (omg * (1.0 + g)).max(0.0);
        let kappa = k2.sqrt();
        if kappa < 1e-150 {
            return (kappa, self.lambda * (0.5 * self.s).sqrt());
        }
        (kappa, -g * dg / kappa)
    }
}

/// Two qubits, each coupled to its own amplitude-damping reservoir.
#[derive(Debug, Clone)]
pub struct AmplitudeDamping {
    params: AmplitudeDampingParams,
}

pub fn amplitude_damping_family(p: AmplitudeDampingParams) -> AmplitudeDamping {
    AmplitudeDamping { params: p }
}

impl AmplitudeDamping {
    pub fn params(&self) -> AmplitudeDampingParams {
        self.params
    }

    /// Single-qubit pair (K₁, K₂) and their derivatives.
    pub fn single_qubit(&self, t: f64) -> ([ComplexMatrix; 2], [ComplexMatrix; 2]) {
        let (g, dg) = self.params.gamma_and_rate(t);
        let (k, dk) = self.params.kappa_and_rate(t);
        let k1 = ComplexMatrix::from_real_diag(&[1.0, g]);
        let k2 = ComplexMatrix::from_real(2, &[0.0, k, 0.0, 0.0]);
        let dk1 = ComplexMatrix::from_real_diag(&[0.0, dg]);
        let dk2 = ComplexMatrix::from_real(2, &[0.0, dk, 0.0, 0.0]);
        ([k1, k2], [dk1, dk2])
    }
}

impl KrausFamily for AmplitudeDamping {
    fn dim(&self) -> usize {
        4
    }

    fn operators(&self, t: f64) -> Vec<ComplexMatrix> {
        let (k, _) = self.single_qubit(t);
        let mut ops = Vec::with_capacity(4);
        for a in &k {
            for b in &k {
                ops.push(kron(a, b));
            }
        }
        ops
    }

    fn derivatives(&self, t: f64) -> Option<Vec<ComplexMatrix>> {
        let (k, dk) = self.single_qubit(t);
        let mut out = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                out.push(&kron(&dk[i], &k[j]) + &kron(&k[i], &dk[j]));
            }
        }
        Some(out)
    }

    fn name(&self) -> &str {
        "amplitude_damping"
    }
}

type OpsFn = dyn Fn(f64) -> Vec<ComplexMatrix> + Send + Sync;

/// Kraus family from user closures; derivatives are optional.
pub struct ClosureKraus {
    dim: usize,
    ops: Box<OpsFn>,
    dops: Option<Box<OpsFn>>,
}

impl ClosureKraus {
    pub fn new<F>(dim: usize, ops: F) -> Self
    where
        F: Fn(f64) -> Vec<ComplexMatrix> + Send + Sync + 'static,
    {
        Self {
            dim,
            ops: Box::new(ops),
            dops: None,
        }
    }

    pub fn with_derivatives<G>(mut self, dops: G) -> Self
    where
        G: Fn(f64) -> Vec<ComplexMatrix> + Send + Sync + 'static,
    {
        self.dops = Some(Box::new(dops));
        self
    }
}

impl KrausFamily for ClosureKraus {
    fn dim(&self) -> usize {
        self.dim
    }

    fn operators(&self, t: f64) -> Vec<ComplexMatrix> {
        (self.ops)(t)
    }

    fn derivatives(&self, t: f64) -> Option<Vec<ComplexMatrix>> {
        self.dops.as_ref().map(|d| d(t))
    }

    fn name(&self) -> &str {
        "closure"
    }
}

/// Kraus operators tabulated at increasing times.
///
/// Between knots the operators are interpolated linearly and then
/// renormalized as K_l S^{-1/2} with S = Σ K†K so that every interpolated
/// set is again trace preserving. Outside the table the end values are held.
/// Derivatives come from finite differences.
///
/// File format (blank lines and `#` comments ignored):
///
/// ```text
/// <dim> <number of operators>
/// t <time>
/// <dim*dim lines "re im" for operator 0, row-major>
/// ... remaining operators ...
/// t <next time>
/// ...
/// ```
#[derive(Debug, Clone)]
pub struct TabulatedKraus {
    dim: usize,
    times: Vec<f64>,
    table: Vec<Vec<ComplexMatrix>>,
}

impl TabulatedKraus {
    pub fn new(times: Vec<f64>, table: Vec<Vec<ComplexMatrix>>) -> Result<Self, DynamicsError> {
        if times.is_empty() || times.len() != table.len() {
            return Err(DynamicsError::Table("need one operator set per time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::Table("times must be strictly increasing".into()));
        }
        let n_ops = table[0].len();
        if n_ops == 0 {
            return Err(DynamicsError::Table("empty operator set".into()));
        }
        let dim = table[0][0].dim();
        for (t, set) in times.iter().zip(&table) {
            if set.len() != n_ops || set.iter().any(|k| k.dim() != dim) {
                return Err(DynamicsError::Table(format!("inconsistent operator set at t = {t}")));
            }
            let deviation = completeness_deviation(set);
            if deviation > COMPLETENESS_TOL {
                return Err(DynamicsError::CompletenessViolation { t: *t, deviation });
            }
        }
        Ok(Self { dim, times, table })
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, DynamicsError> {
        let mut lines = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                lines.push(line.to_owned());
            }
        }
        let mut it = lines.into_iter();
        let header = it.next().ok_or_else(|| DynamicsError::Table("empty input".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| DynamicsError::Table(format!("bad header {header:?}"))))
            .collect::<Result<_, _>>()?;
        let [dim, n_ops] = nums[..] else {
            return Err(DynamicsError::Table(format!("bad header {header:?}")));
        };
        if dim == 0 || n_ops == 0 {
            return Err(DynamicsError::Table("dimension and operator count must be positive".into()));
        }
        let mut times = Vec::new();
        let mut table = Vec::new();
        while let Some(line) = it.next() {
            let t: f64 = line
                .strip_prefix('t')
                .and_then(|rest| rest.trim().parse().ok())
                .ok_or_else(|| DynamicsError::Table(format!("expected 't <time>', got {line:?}")))?;
            let mut set = Vec::with_capacity(n_ops);
            for _ in 0..n_ops {
                let mut data = Vec::with_capacity(dim * dim);
                for _ in 0..dim * dim {
                    let entry = it
                        .next()
                        .ok_or_else(|| DynamicsError::Table(format!("truncated operator at t = {t}")))?;
                    let parts: Vec<f64> = entry
                        .split_whitespace()
                        .map(|w| w.parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| DynamicsError::Table(format!("bad entry {entry:?}")))?;
                    let [re, im] = parts[..] else {
                        return Err(DynamicsError::Table(format!("bad entry {entry:?}")));
                    };
                    data.push(Complex64::new(re, im));
                }
                set.push(ComplexMatrix::from_vec(dim, data));
            }
            times.push(t);
            table.push(set);
        }
        Self::new(times, table)
    }

    pub fn load(path: &Path) -> Result<Self, DynamicsError> {
        Self::read(io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn time_span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("nonempty"))
    }
}

impl KrausFamily for TabulatedKraus {
    fn dim(&self) -> usize {
        self.dim
    }

    fn operators(&self, t: f64) -> Vec<ComplexMatrix> {
        let (first, last) = self.time_span();
        if t <= first {
            return self.table[0].clone();
        }
        if t >= last {
            return self.table[self.table.len() - 1].clone();
        }
        let hi = self.times.partition_point(|&x| x <= t);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        let mixed: Vec<ComplexMatrix> = self.table[lo]
            .iter()
            .zip(&self.table[hi])
            .map(|(a, b)| &a.scale_real(1.0 - w) + &b.scale_real(w))
            .collect();
        let mut s = ComplexMatrix::zeros(self.dim);
        for k in &mixed {
            s = &s + &(&k.adjoint() * k);
        }
        match crate::linalg::mat_pow(&s, -0.5) {
            Ok(fix) => mixed.iter().map(|k| k * &fix).collect(),
            Err(_) => mixed,
        }
    }

    fn name(&self) -> &str {
        "tabulated"
    }
}
