//! Entropic upper bounds and quantum speed limit times.
//!
//! Every bound here has the same ingredients: the smallest and largest
//! eigenvalues of the initial state (through [`h_func`]), the smallest
//! eigenvalue of the evolved state along the path, and a speed, which is either
//! the true Schatten speed ‖dρ_t/dt‖₁ or its Kraus-operator upper bound.

use std::fmt;

use thiserror::Error;

use crate::dynamics::{evolve_kraus, variance_h, DynamicsError, HamiltonianModel, KrausFamily, Trajectory};
use crate::entropy::{fidelity, renyi_az, EntropyError, EntropyParams, EntropyValue, SpecialCase};
use crate::linalg::SUPPORT_TOL;
use crate::states::DensityMatrix;

/// Floor applied to k_min(ρ_t) inside the bound integrands.
pub const KMIN_CLAMP: f64 = 1e-12;
/// Largest accepted relative difference between full- and half-grid quadrature.
pub const QUADRATURE_TOL: f64 = 1e-4;
/// |1 + (1−α) ln k_min| at or below this is treated as zero.
pub const H_DENOMINATOR_TOL: f64 = 1e-9;
/// Denominators below this count as zero speed.
pub const ZERO_SPEED_TOL: f64 = 1e-15;
/// Entropies at or below this count as zero when the speed vanishes.
pub const ZERO_ENTROPY_TOL: f64 = 1e-12;
/// Largest spectrum difference accepted between the ends of a unitary path.
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum QslError {
    #[error("state is rank deficient (k_min = {k_min:.3e}); the bound needs a full-rank initial state")]
    SingularState { k_min: f64 },
    #[error("|1 + (1 - alpha) ln k_min| = {value:.3e} is too close to zero")]
    DenominatorNearZero { value: f64 },
    #[error("quadrature not converged: full grid {full:.12e}, half grid {half:.12e}")]
    QuadratureTooCoarse { full: f64, half: f64 },
    #[error("speed integral vanishes while the entropy is {entropy:.3e}")]
    ZeroSpeed { entropy: f64 },
    #[error("time horizon is zero")]
    ZeroHorizon,
    #[error("final state is not unitarily reachable (spectra differ by {deviation:.3e})")]
    SpectrumMismatch { deviation: f64 },
    #[error("energy variance vanishes; the state does not evolve")]
    ZeroVariance,
    #[error("series range is degenerate (max - min = {0:.3e})")]
    DegenerateRange(f64),
    #[error("entropy is infinite")]
    InfiniteEntropy,
    #[error("trajectory has no Kraus speed terms")]
    MissingKrausTerms,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Non-fatal conditions attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QslWarning {
    /// k_min(ρ_t) fell below [`KMIN_CLAMP`] and was clamped; the bound is loose.
    LooseBound,
    /// 1 + (1−α) ln k_min(ρ₀) is negative.
    ChainSign,
    /// (α, z) lies outside 1 ≥ z ≥ max(α, 1−α).
    DpiInvalid,
}

impl QslWarning {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LooseBound => "loose_bound",
            Self::ChainSign => "chain_sign",
            Self::DpiInvalid => "dpi_invalid",
        }
    }
}

impl fmt::Display for QslWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn push_unique(list: &mut Vec<QslWarning>, w: QslWarning) {
    if !list.contains(&w) {
        list.push(w);
        list.sort();
    }
}

fn chain_factor(k_min: f64, alpha: f64) -> f64 {
    1.0 + (1.0 - alpha) * k_min.ln()
}

/// (k_max k_min^{z−1})^{(1−α)/z} / |1 + (1−α) ln k_min| for the initial state.
pub fn h_func(rho0: &DensityMatrix, p: EntropyParams) -> Result<f64, QslError> {
    h_from_spectrum(rho0.k_min(), rho0.k_max(), p.alpha(), p.z())
}

fn h_from_spectrum(k_min: f64, k_max: f64, alpha: f64, z: f64) -> Result<f64, QslError> {
    if k_min <= SUPPORT_TOL {
        return Err(QslError::SingularState { k_min });
    }
    let c = chain_factor(k_min, alpha);
    if c.abs() <= H_DENOMINATOR_TOL {
        return Err(QslError::DenominatorNearZero { value: c });
    }
    Ok((k_max * k_min.powf(z - 1.0)).powf((1.0 - alpha) / z) / c.abs())
}

/// The pair (h_{α,z}, h_{1−α,z}) plus the warnings their arguments imply.
#[derive(Debug, Clone, Copy)]
struct Prefactors {
    alpha: f64,
    h_fwd: f64,
    h_bwd: f64,
    chain_sign: bool,
}

impl Prefactors {
    fn new(rho0: &DensityMatrix, p: EntropyParams) -> Result<Self, QslError> {
        let alpha = p.alpha();
        let (kmin, kmax) = (rho0.k_min(), rho0.k_max());
        Ok(Self {
            alpha,
            h_fwd: h_from_spectrum(kmin, kmax, alpha, p.z())?,
            h_bwd: h_from_spectrum(kmin, kmax, 1.0 - alpha, p.z())?,
            chain_sign: chain_factor(kmin, alpha) < 0.0,
        })
    }

    fn phi(&self, k_t: f64) -> f64 {
        let a = self.alpha;
        a * self.h_fwd * k_t.powf(a - 1.0) + (1.0 - a).abs() * self.h_bwd * k_t.powf(-a)
    }
}

/// Φ_{α,z}(ρ₀, ρ_t) = α h_{α,z}(ρ₀) k_min(ρ_t)^{α−1} + |1−α| h_{1−α,z}(ρ₀) k_min(ρ_t)^{−α}.
pub fn phi_func(rho0: &DensityMatrix, rho_t: &DensityMatrix, p: EntropyParams) -> Result<f64, QslError> {
    let k_t = rho_t.k_min();
    if k_t <= SUPPORT_TOL {
        return Err(QslError::SingularState { k_min: k_t });
    }
    Ok(Prefactors::new(rho0, p)?.phi(k_t))
}

/// Composite Simpson on a uniform grid, with a 3/8 panel at the end when the
/// number of intervals is odd.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let m = values.len().saturating_sub(1);
    match m {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let (even_part, tail) = if m % 2 == 0 { (m, 0) } else { (m - 3, 3) };
            let mut acc = 0.0;
            if even_part > 0 {
                acc += values[0] + values[even_part];
                for (i, v) in values.iter().enumerate().take(even_part).skip(1) {
                    acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                acc *= h / 3.0;
            }
            if tail == 3 {
                let b = even_part;
                acc += 3.0 * h / 8.0
                    * (values[b] + 3.0 * values[b + 1] + 3.0 * values[b + 2] + values[b + 3]);
            }
            acc
        }
    }
}

/// Speed-weighted integrals ∫ k^{α−1} w dt and ∫ k^{−α} w dt along a path.
#[derive(Debug, Clone, Copy)]
struct WeightedIntegrals {
    fwd: f64,
    bwd: f64,
    clamped: bool,
}

fn weighted_integrals(times: &[f64], kmins: &[f64], weights: &[f64], alpha: f64) -> Result<WeightedIntegrals, QslError> {
    let n = times.len();
    if n < 2 || kmins.len() != n || weights.len() != n {
        return Err(QslError::InvalidInput("trajectory arrays must share a length of at least 2".into()));
    }
    let span = times[n - 1] - times[0];
    let h = span / (n - 1) as f64;
    let mut clamped = false;
    let mut fwd = Vec::with_capacity(n);
    let mut bwd = Vec::with_capacity(n);
    for (&k, &w) in kmins.iter().zip(weights) {
        let k = if k < KMIN_CLAMP {
            clamped = true;
            KMIN_CLAMP
        } else {
            k
        };
        fwd.push(k.powf(alpha - 1.0) * w);
        bwd.push(k.powf(-alpha) * w);
    }
    let result = WeightedIntegrals {
        fwd: simpson_uniform(&fwd, h),
        bwd: simpson_uniform(&bwd, h),
        clamped,
    };
    // Half-grid comparison. Clamped integrands contain artificial spikes that
    // no grid resolves, and the report already flags them as loose.
    if !clamped && (n - 1) % 2 == 0 && (n - 1) / 2 >= 2 {
        for (series, full) in [(&fwd, result.fwd), (&bwd, result.bwd)] {
            let coarse: Vec<f64> = series.iter().step_by(2).copied().collect();
            let half = simpson_uniform(&coarse, 2.0 * h);
            if full.abs() > 0.0 && (full - half).abs() > QUADRATURE_TOL * full.abs() {
                return Err(QslError::QuadratureTooCoarse { full, half });
            }
        }
    }
    Ok(result)
}

/// D(ρ_τ‖ρ₀), D(ρ₀‖ρ_τ) and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTriple {
    pub fwd: EntropyValue,
    pub bwd: EntropyValue,
    pub sym: EntropyValue,
}

impl EntropyTriple {
    pub fn new(rho0: &DensityMatrix, rho_tau: &DensityMatrix, p: EntropyParams) -> Result<Self, QslError> {
        let fwd = renyi_az(rho_tau, rho0, p)?;
        let bwd = renyi_az(rho0, rho_tau, p)?;
        Ok(Self { fwd, bwd, sym: fwd + bwd })
    }
}

/// Integrated upper bounds on the three entropies.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub d_fwd: EntropyValue,
    pub d_bwd: EntropyValue,
    pub d_sym: EntropyValue,
    /// Bound on D(ρ_τ‖ρ₀).
    pub rhs_fwd: f64,
    /// Bound on D(ρ₀‖ρ_τ).
    pub rhs_bwd: f64,
    /// Bound on the symmetrized entropy, rhs_fwd + rhs_bwd.
    pub rhs_sym: f64,
    /// 1 − d_sym / rhs_sym.
    pub delta_bound: f64,
    pub warnings: Vec<QslWarning>,
}

impl BoundReport {
    /// Whether every finite entropy sits below its bound within `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        [(self.d_fwd, self.rhs_fwd), (self.d_bwd, self.rhs_bwd), (self.d_sym, self.rhs_sym)]
            .iter()
            .all(|(d, rhs)| d.finite().is_none_or(|d| d <= rhs + slack))
    }
}

fn delta_from(d: EntropyValue, rhs: f64) -> Result<f64, QslError> {
    match d {
        EntropyValue::Infinite => Ok(f64::NEG_INFINITY),
        EntropyValue::Finite(d) if rhs < ZERO_SPEED_TOL => {
            if d.abs() <= ZERO_ENTROPY_TOL {
                Ok(0.0)
            } else {
                Err(QslError::ZeroSpeed { entropy: d })
            }
        }
        EntropyValue::Finite(d) => Ok(1.0 - d / rhs),
    }
}

fn base_warnings(p: EntropyParams, pre: &Prefactors, clamped: bool) -> Vec<QslWarning> {
    let mut w = Vec::new();
    if clamped {
        push_unique(&mut w, QslWarning::LooseBound);
    }
    if pre.chain_sign {
        push_unique(&mut w, QslWarning::ChainSign);
    }
    if !p.dpi_valid() {
        push_unique(&mut w, QslWarning::DpiInvalid);
    }
    w
}

/// Integrates the three upper bounds along `traj` using its true speed.
pub fn integrate_bounds(traj: &Trajectory, p: EntropyParams) -> Result<BoundReport, QslError> {
    let triple = EntropyTriple::new(traj.initial(), traj.final_state(), p)?;
    integrate_bounds_with(traj, p, triple)
}

/// As [`integrate_bounds`], reusing entropies that were already computed.
pub fn integrate_bounds_with(traj: &Trajectory, p: EntropyParams, d: EntropyTriple) -> Result<BoundReport, QslError> {
    let pre = Prefactors::new(traj.initial(), p)?;
    let a = p.alpha();
    let ints = weighted_integrals(&traj.times, &traj.kmins, &traj.speeds, a)?;
    let rhs_fwd = a * pre.h_fwd / (1.0 - a).abs() * ints.fwd;
    let rhs_bwd = pre.h_bwd * ints.bwd;
    let rhs_sym = rhs_fwd + rhs_bwd;
    Ok(BoundReport {
        d_fwd: d.fwd,
        d_bwd: d.bwd,
        d_sym: d.sym,
        rhs_fwd,
        rhs_bwd,
        rhs_sym,
        delta_bound: delta_from(d.sym, rhs_sym)?,
        warnings: base_warnings(p, &pre, ints.clamped),
    })
}

/// Speed-limit times for one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct QslReport {
    pub tau: f64,
    pub d_fwd: EntropyValue,
    pub d_bwd: EntropyValue,
    pub d_sym: EntropyValue,
    /// Time bound from D(ρ_τ‖ρ₀).
    pub tau_fwd: f64,
    /// Time bound from D(ρ₀‖ρ_τ).
    pub tau_bwd: f64,
    /// Time bound from the symmetrized entropy.
    pub tau_sym: f64,
    /// max(tau_fwd, tau_bwd, tau_sym).
    pub tau_qsl: f64,
    /// 1 − tau_qsl / tau.
    pub delta_qsl: f64,
    pub warnings: Vec<QslWarning>,
}

/// numerator / denominator, with 0/0 → 0 and x/0 → ZeroSpeed.
fn ratio(numerator: EntropyValue, denominator: f64, scale: f64) -> Result<f64, QslError> {
    let d = numerator.finite().ok_or(QslError::InfiniteEntropy)?;
    if denominator < ZERO_SPEED_TOL {
        if d.abs() <= ZERO_ENTROPY_TOL {
            return Ok(0.0);
        }
        return Err(QslError::ZeroSpeed { entropy: d });
    }
    Ok(scale * d / denominator)
}

fn assemble(
    tau: f64,
    d: EntropyTriple,
    taus: [f64; 3],
    warnings: Vec<QslWarning>,
) -> QslReport {
    let [tau_fwd, tau_bwd, tau_sym] = taus;
    let tau_qsl = tau_fwd.max(tau_bwd).max(tau_sym);
    QslReport {
        tau,
        d_fwd: d.fwd,
        d_bwd: d.bwd,
        d_sym: d.sym,
        tau_fwd,
        tau_bwd,
        tau_sym,
        tau_qsl,
        delta_qsl: 1.0 - tau_qsl / tau,
        warnings,
    }
}

/// Speed-limit times from a bound report: each time is τ·D/rhs.
pub fn qsl_general_from(bounds: &BoundReport, tau: f64) -> Result<QslReport, QslError> {
    if tau <= 0.0 {
        return Err(QslError::ZeroHorizon);
    }
    let d = EntropyTriple {
        fwd: bounds.d_fwd,
        bwd: bounds.d_bwd,
        sym: bounds.d_sym,
    };
    let taus = [
        ratio(d.fwd, bounds.rhs_fwd, tau)?,
        ratio(d.bwd, bounds.rhs_bwd, tau)?,
        ratio(d.sym, bounds.rhs_sym, tau)?,
    ];
    Ok(assemble(tau, d, taus, bounds.warnings.clone()))
}

/// Speed-limit times along a trajectory using its true Schatten speed.
pub fn qsl_general(traj: &Trajectory, p: EntropyParams) -> Result<QslReport, QslError> {
    let bounds = integrate_bounds(traj, p)?;
    qsl_general_from(&bounds, traj.horizon())
}

/// Closed-form speed limits for unitary evolution. They depend only on the
/// end states and ΔH, so the horizon is supplied separately through
/// [`UnitaryQsl::with_horizon`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryQsl {
    pub d: EntropyTriple,
    pub energy_spread: f64,
    pub tau_fwd: f64,
    pub tau_bwd: f64,
    pub tau_sym: f64,
    pub warnings: Vec<QslWarning>,
}

impl UnitaryQsl {
    pub fn tau_qsl(&self) -> f64 {
        self.tau_fwd.max(self.tau_bwd).max(self.tau_sym)
    }

    pub fn with_horizon(&self, tau: f64) -> Result<QslReport, QslError> {
        if tau <= 0.0 {
            return Err(QslError::ZeroHorizon);
        }
        Ok(assemble(tau, self.d, [self.tau_fwd, self.tau_bwd, self.tau_sym], self.warnings.clone()))
    }
}

fn unitary_checks(h: &HamiltonianModel, rho0: &DensityMatrix, rho_tau: &DensityMatrix) -> Result<f64, QslError> {
    if rho0.dim() != rho_tau.dim() || h.dim() != rho0.dim() {
        return Err(QslError::InvalidInput("dimension mismatch".into()));
    }
    let deviation = rho0
        .eigenvalues()
        .iter()
        .zip(rho_tau.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > SPECTRUM_TOL {
        return Err(QslError::SpectrumMismatch { deviation });
    }
    let dh = variance_h(h, rho0)?;
    if dh <= 1e-12 {
        return Err(QslError::ZeroVariance);
    }
    Ok(dh)
}

/// Unitary speed limits with 2ΔH in place of the time-averaged speed.
pub fn qsl_unitary(
    h: &HamiltonianModel,
    rho0: &DensityMatrix,
    rho_tau: &DensityMatrix,
    p: EntropyParams,
) -> Result<UnitaryQsl, QslError> {
    let dh = unitary_checks(h, rho0, rho_tau)?;
    let pre = Prefactors::new(rho0, p)?;
    let d = EntropyTriple::new(rho0, rho_tau, p)?;
    let a = p.alpha();
    let k0 = rho0.k_min();
    let tau_fwd = ratio(d.fwd, 2.0 * a * pre.h_fwd * k0.powf(a - 1.0) * dh, (1.0 - a).abs())?;
    let tau_bwd = ratio(d.bwd, 2.0 * pre.h_bwd * k0.powf(-a) * dh, 1.0)?;
    let tau_sym = ratio(d.sym, 2.0 * pre.phi(k0) * dh, (1.0 - a).abs())?;
    Ok(UnitaryQsl {
        d,
        energy_spread: dh,
        tau_fwd,
        tau_bwd,
        tau_sym,
        warnings: base_warnings(p, &pre, false),
    })
}

/// Forward unitary bound at z = 1, written with the Petz entropy R_α.
pub fn qsl_unitary_petz(
    h: &HamiltonianModel,
    rho0: &DensityMatrix,
    rho_tau: &DensityMatrix,
    alpha: f64,
) -> Result<f64, QslError> {
    let dh = unitary_checks(h, rho0, rho_tau)?;
    let (k, kmax) = (rho0.k_min(), rho0.k_max());
    if k <= SUPPORT_TOL {
        return Err(QslError::SingularState { k_min: k });
    }
    let r = crate::entropy::special_case(rho_tau, rho0, SpecialCase::Petz(alpha))?;
    let c = chain_factor(k, alpha).abs();
    let denom = 2.0 * alpha * kmax.powf(1.0 - alpha) * k.powf(alpha - 1.0) * dh;
    ratio(r, denom, (1.0 - alpha).abs() * c)
}

/// Forward unitary bound at α = z = 1/2, written with the Uhlmann fidelity.
pub fn qsl_unitary_fidelity(h: &HamiltonianModel, rho0: &DensityMatrix, rho_tau: &DensityMatrix) -> Result<f64, QslError> {
    let dh = unitary_checks(h, rho0, rho_tau)?;
    let (k, kmax) = (rho0.k_min(), rho0.k_max());
    if k <= SUPPORT_TOL {
        return Err(QslError::SingularState { k_min: k });
    }
    let f = fidelity(rho_tau, rho0)?.min(1.0);
    Ok(-(2.0 + k.ln()).abs() * k * f.ln() / (2.0 * kmax * dh))
}

/// Kraus speed limits on a fresh trajectory.
pub fn qsl_nonunitary(
    family: &dyn KrausFamily,
    rho0: &DensityMatrix,
    tau: f64,
    p: EntropyParams,
    n_steps: usize,
) -> Result<QslReport, QslError> {
    if tau <= 0.0 {
        return Err(QslError::ZeroHorizon);
    }
    let traj = evolve_kraus(family, rho0, tau, n_steps)?;
    qsl_nonunitary_on(&traj, p)
}

/// Kraus speed limits on an existing trajectory. The Kraus sum
/// Σ_l ‖K_l ρ₀ dK_l†‖₁ replaces the speed, with an extra factor 2.
pub fn qsl_nonunitary_on(traj: &Trajectory, p: EntropyParams) -> Result<QslReport, QslError> {
    let d = EntropyTriple::new(traj.initial(), traj.final_state(), p)?;
    qsl_nonunitary_with(traj, p, d)
}

/// As [`qsl_nonunitary_on`], reusing entropies that were already computed.
pub fn qsl_nonunitary_with(traj: &Trajectory, p: EntropyParams, d: EntropyTriple) -> Result<QslReport, QslError> {
    let tau = traj.horizon();
    if tau <= 0.0 {
        return Err(QslError::ZeroHorizon);
    }
    let terms = traj.kraus_terms.as_ref().ok_or(QslError::MissingKrausTerms)?;
    let pre = Prefactors::new(traj.initial(), p)?;
    let a = p.alpha();
    let ints = weighted_integrals(&traj.times, &traj.kmins, terms, a)?;
    let gap = (1.0 - a).abs();
    let taus = [
        ratio(d.fwd, 2.0 * a * pre.h_fwd * ints.fwd, gap * tau)?,
        ratio(d.bwd, 2.0 * pre.h_bwd * ints.bwd, tau)?,
        ratio(d.sym, 2.0 * (a * pre.h_fwd * ints.fwd + gap * pre.h_bwd * ints.bwd), gap * tau)?,
    ];
    Ok(assemble(tau, d, taus, base_warnings(p, &pre, ints.clamped)))
}

/// Affine rescale to [0, 1]: (x − min)/(max − min).
pub fn normalize_series(values: &[f64]) -> Result<Vec<f64>, QslError> {
    if values.len() < 2 {
        return Err(QslError::InvalidInput("need at least two values to normalize".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(QslError::InvalidInput("values must be finite".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range < 1e-15 {
        return Err(QslError::DegenerateRange(range));
    }
    Ok(values.iter().map(|v| (v - lo) / range).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        amplitude_damping_family, depolarizing_family, evolve_unitary, AmplitudeDampingParams, DepolarizingParams,
        HamiltonianModel,
    };
    use crate::linalg::trace_norm;
    use crate::sample;
    use crate::states::{bloch_state, ghz_mixed, BlochVector, GhzMixedParams};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64, z: f64) -> EntropyParams {
        EntropyParams::new(alpha, z).unwrap()
    }

    fn bloch(r: f64, theta: f64, phi: f64) -> DensityMatrix {
        bloch_state(BlochVector::new(r, theta, phi).unwrap()).unwrap()
    }

    fn depolarizing_run(r: f64, gamma_tau: f64, n: usize) -> Trajectory {
        let fam = depolarizing_family(DepolarizingParams::new(1.0).unwrap());
        evolve_kraus(&fam, &bloch(r, 0.4, 1.1), gamma_tau, n).unwrap()
    }

    #[test]
    fn h_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let h = h_func(&mixed, params(0.5, 1.0)).unwrap();
        let want = 1.0 / (2f64.sqrt() * (1.0 - 2f64.ln() / 2.0).abs());
        assert_abs_diff_eq!(h, want, epsilon = 1e-12);
        assert_abs_diff_eq!(h, 1.082152, epsilon = 1e-6);

        let pure = bloch(1.0, 0.0, 0.0);
        assert!(matches!(h_func(&pure, params(0.5, 1.0)), Err(QslError::SingularState { .. })));
        // 1 + (1-α) ln k = 0 at k = e^{-1/(1-α)}.
        let k = (-2.0f64).exp();
        let rho = DensityMatrix::new(crate::linalg::ComplexMatrix::from_real_diag(&[k, 1.0 - k])).unwrap();
        assert!(matches!(h_func(&rho, params(0.5, 1.0)), Err(QslError::DenominatorNearZero { .. })));
    }

    #[test]
    fn h_matches_qubit_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let r = rng.random_range(0.0..0.95);
            let a = rng.random_range(0.05..0.95);
            let z = rng.random_range(0.2..1.5);
            let rho = bloch(r, rng.random_range(0.0..3.0), rng.random_range(0.0..6.0));
            let c = 1.0 + (1.0 - a) * ((1.0 - r) / 2.0).ln();
            if c.abs() < 1e-6 {
                continue;
            }
            let want = ((1.0 + r) * (1.0 - r).powf(z - 1.0)).powf((1.0 - a) / z) / (2f64.powf(1.0 - a) * c.abs());
            let got = h_func(&rho, params(a, z)).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.max(1.0));
            assert!(h_func(&rho, params(1.0 - a, z)).is_ok() || (1.0 + a * ((1.0 - r) / 2.0).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn phi_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let p = params(0.5, 1.0);
        let h = h_func(&mixed, p).unwrap();
        assert_abs_diff_eq!(phi_func(&mixed, &mixed, p).unwrap(), 2f64.sqrt() * h, epsilon = 1e-12);

        let rho0 = bloch(0.6, 0.0, 0.0);
        let mut last = 0.0;
        for r in [0.1, 0.5, 0.9, 0.99, 0.999] {
            let phi = phi_func(&rho0, &bloch(r, 0.0, 0.0), params(0.3, 0.8)).unwrap();
            assert!(phi > last);
            last = phi;
        }
    }

    #[test]
    fn simpson_exactness() {
        for n in [3usize, 4, 5, 8, 11] {
            let h = 2.0 / (n - 1) as f64;
            let cubic: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3) - (i as f64 * h)).collect();
            assert_abs_diff_eq!(simpson_uniform(&cubic, h), 4.0 - 2.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(simpson_uniform(&[1.0, 3.0], 0.5), 1.0);
    }

    #[test]
    fn stationary_trajectory_is_tight() {
        let h = HamiltonianModel::qubit([0.0, 0.0, 1.0]).unwrap();
        let rho = DensityMatrix::new(crate::linalg::ComplexMatrix::from_real_diag(&[0.3, 0.7])).unwrap();
        let traj = evolve_unitary(&h, &rho, 2.0, 101).unwrap();
        let b = integrate_bounds(&traj, params(0.4, 0.8)).unwrap();
        assert_eq!((b.rhs_fwd, b.rhs_bwd, b.rhs_sym), (0.0, 0.0, 0.0));
        assert!(b.d_sym.finite().unwrap().abs() < 1e-12);
        assert_eq!(b.delta_bound, 0.0);
        let q = qsl_general(&traj, params(0.4, 0.8)).unwrap();
        assert_eq!(q.tau_qsl, 0.0);
        assert_eq!(q.delta_qsl, 1.0);
    }

    #[test]
    fn half_order_collapse() {
        let traj = depolarizing_run(0.75, 3.0, 1001);
        let b = integrate_bounds(&traj, params(0.5, 0.8)).unwrap();
        assert_abs_diff_eq!(b.rhs_fwd, b.rhs_bwd, epsilon = 1e-12 * b.rhs_fwd);
        assert_abs_diff_eq!(b.d_fwd.as_f64(), b.d_bwd.as_f64(), epsilon = 1e-10);
        let q = qsl_general(&traj, params(0.5, 0.8)).unwrap();
        assert_abs_diff_eq!(q.tau_fwd, q.tau_bwd, epsilon = 1e-10);
        assert_abs_diff_eq!(q.tau_fwd, q.tau_sym, epsilon = 1e-10);
    }

    #[test]
    fn depolarizing_bound_holds_strictly() {
        let traj = depolarizing_run(0.75, 5.0, 1001);
        let b = integrate_bounds(&traj, params(0.3, 1.0)).unwrap();
        assert!(b.d_fwd.as_f64() < b.rhs_fwd);
        assert!(b.holds(0.0));
        assert!(b.delta_bound > 0.0 && b.delta_bound <= 1.0);
    }

    #[test]
    fn chain_sign_and_dpi_warnings() {
        let traj = depolarizing_run(0.75, 2.0, 201);
        let b = integrate_bounds(&traj, params(0.3, 0.75)).unwrap();
        assert!(b.warnings.contains(&QslWarning::ChainSign));
        let b = integrate_bounds(&traj, params(0.3, 0.5)).unwrap();
        assert!(b.warnings.contains(&QslWarning::DpiInvalid));
        let traj = depolarizing_run(0.2, 2.0, 201);
        let b = integrate_bounds(&traj, params(0.5, 1.0)).unwrap();
        assert!(b.warnings.is_empty());
    }

    #[test]
    fn clamping_flags_loose_bound() {
        // Strong coupling drives γ through zero, where ρ_t is pure.
        let p = AmplitudeDampingParams::new(1.0, 10.0).unwrap();
        let t0 = (1..100000).map(|k| k as f64 * 1e-5).find(|&t| p.gamma(t) <= 0.0).unwrap();
        let fam = amplitude_damping_family(p);
        let rho0 = ghz_mixed(GhzMixedParams::new(0.25).unwrap()).unwrap();
        // Pick a horizon so that one grid point falls almost on the zero.
        let traj = evolve_kraus(&fam, &rho0, 2.0 * t0, 3).unwrap();
        assert!(traj.kmins[1] < KMIN_CLAMP);
        let b = integrate_bounds(&traj, params(0.4, 0.8)).unwrap();
        assert!(b.warnings.contains(&QslWarning::LooseBound));
        assert!(b.holds(1e-8));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let traj = depolarizing_run(0.75, 20.0, 9);
        assert!(matches!(
            integrate_bounds(&traj, params(0.3, 1.0)),
            Err(QslError::QuadratureTooCoarse { .. })
        ));
    }

    #[test]
    fn identity_channel_gives_zero() {
        let fam = crate::dynamics::ClosureKraus::new(2, |_| vec![crate::linalg::ComplexMatrix::identity(2)]);
        let q = qsl_nonunitary(&fam, &bloch(0.5, 0.2, 0.1), 3.0, params(0.4, 0.9), 101).unwrap();
        assert_eq!(q.tau_qsl, 0.0);
        assert!(matches!(
            qsl_nonunitary(&fam, &bloch(0.5, 0.2, 0.1), 0.0, params(0.4, 0.9), 101),
            Err(QslError::ZeroHorizon)
        ));
    }

    #[test]
    fn nonunitary_is_below_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let traj = depolarizing_run(rng.random_range(0.1..0.9), rng.random_range(0.5..10.0), 1001);
            let a = rng.random_range(0.05..0.95);
            let p = params(a, rng.random_range(a.max(1.0 - a)..=1.0));
            let g = qsl_general(&traj, p).unwrap();
            let k = qsl_nonunitary_on(&traj, p).unwrap();
            assert!(k.tau_qsl <= g.tau_qsl + 1e-8);
        }
    }

    #[test]
    fn z_monotonicity_depolarizing() {
        let fam = depolarizing_family(DepolarizingParams::new(1.0).unwrap());
        let rho0 = bloch(0.75, 0.4, 1.1);
        let taus: Vec<f64> = [1.0, 0.8, 0.7]
            .iter()
            .map(|&z| qsl_nonunitary(&fam, &rho0, 5.0, params(0.3, z), 1001).unwrap().tau_qsl)
            .collect();
        assert!(taus[0] > taus[1] && taus[1] > taus[2], "{taus:?}");
    }

    #[test]
    fn unitary_edge_cases() {
        let hz = HamiltonianModel::qubit([0.0, 0.0, 1.0]).unwrap();
        let up = bloch(1.0, 0.0, 0.0);
        assert!(matches!(qsl_unitary(&hz, &up, &up, params(0.5, 1.0)), Err(QslError::ZeroVariance)));
        let rho = bloch(0.5, 1.0, 0.0);
        assert_abs_diff_eq!(qsl_unitary_fidelity(&hz, &rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
        let other = bloch(0.6, 1.0, 0.0);
        assert!(matches!(
            qsl_unitary(&hz, &rho, &other, params(0.5, 1.0)),
            Err(QslError::SpectrumMismatch { .. })
        ));
    }

    #[test]
    fn unitary_fast_paths_agree_with_general_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let n = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let h = HamiltonianModel::qubit(n).unwrap();
            let (r, th, ph) = sample::random_bloch(&mut rng, 0.05, 0.9);
            let rho0 = bloch(r, th, ph);
            if variance_h(&h, &rho0).unwrap() < 1e-3 {
                continue;
            }
            let u = h.propagator(rng.random_range(0.1..3.0));
            let rho_tau = rho0.conjugate_by(&u).unwrap();
            let a = rng.random_range(0.05..0.95);
            let general = qsl_unitary(&h, &rho0, &rho_tau, params(a, 1.0)).unwrap();
            let petz = qsl_unitary_petz(&h, &rho0, &rho_tau, a).unwrap();
            assert!((general.tau_fwd - petz).abs() <= 1e-10 * petz.max(1.0));
            let half = qsl_unitary(&h, &rho0, &rho_tau, params(0.5, 0.5)).unwrap();
            let fid = qsl_unitary_fidelity(&h, &rho0, &rho_tau).unwrap();
            assert!((half.tau_fwd - fid).abs() <= 1e-9 * fid.max(1.0), "{} {}", half.tau_fwd, fid);
        }
    }

    #[test]
    fn unitary_closed_form_matches_trajectory_path() {
        // The closed form uses 2ΔH where the trajectory uses the actual
        // speed, so the two agree after rescaling by speed / 2ΔH.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let n = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let h = HamiltonianModel::qubit(n).unwrap();
            let (r, th, ph) = sample::random_bloch(&mut rng, 0.1, 0.9);
            let rho0 = bloch(r, th, ph);
            let dh = variance_h(&h, &rho0).unwrap();
            if dh < 1e-2 {
                continue;
            }
            let a = rng.random_range(0.1..0.9);
            let p = params(a, rng.random_range(a.max(1.0 - a)..=1.0));
            let tau = rng.random_range(0.2..3.0);
            let traj = evolve_unitary(&h, &rho0, tau, 1001).unwrap();
            let Ok(general) = qsl_general(&traj, p) else { continue };
            let closed = qsl_unitary(&h, &rho0, traj.final_state(), p).unwrap();
            let scale = traj.speeds[0] / (2.0 * dh);
            let rel = (closed.tau_fwd - general.tau_fwd * scale).abs() / general.tau_fwd.max(1e-300);
            assert!(rel <= 1e-4 || general.tau_fwd < 1e-14, "rel {rel}");
        }
    }

    #[test]
    fn mandelstam_tamm_comparison() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut checked = 0;
        while checked < 100 {
            let n = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let h = HamiltonianModel::qubit(n).unwrap();
            let (r, th, ph) = sample::random_bloch(&mut rng, 0.05, 0.95);
            let rho0 = bloch(r, th, ph);
            let dh = variance_h(&h, &rho0).unwrap();
            if dh < 1e-3 {
                continue;
            }
            let rho_tau = rho0.conjugate_by(&h.propagator(rng.random_range(1e-4..2e-2))).unwrap();
            let f = fidelity(&rho_tau, &rho0).unwrap();
            if f <= 0.999 {
                continue;
            }
            let ours = qsl_unitary_fidelity(&h, &rho0, &rho_tau).unwrap();
            let mt = (2.0 * (1.0 - f).max(0.0)).sqrt() / dh;
            assert!(ours <= mt * 1.05 + 1e-15, "{ours} vs {mt}");
            checked += 1;
        }
    }

    #[test]
    fn pinsker_with_order_factor_holds() {
        // Petz-Rényi divergence of order α < 1 dominates (α/2)·‖ρ − σ‖₁².
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..200 {
            let a = rng.random_range(0.02..0.98);
            let r = rng.random_range(0.05..0.95);
            let traj = depolarizing_run(r, rng.random_range(0.1..20.0), 2);
            let rt = crate::entropy::special_case(traj.final_state(), traj.initial(), SpecialCase::Petz(a))
                .unwrap()
                .as_f64();
            let dist = trace_norm(&(traj.final_state().matrix() - traj.initial().matrix())).unwrap();
            assert!(rt >= 0.5 * a * dist * dist - 1e-8);
        }
    }

    #[test]
    fn pinsker_without_order_factor_fails_for_small_orders() {
        // The order-free form R_α ≥ ½‖ρ − σ‖₁² is false below α = 1.
        let traj = depolarizing_run(0.75, 20.0, 2);
        let rt = crate::entropy::special_case(traj.final_state(), traj.initial(), SpecialCase::Petz(0.5))
            .unwrap()
            .as_f64();
        let dist = trace_norm(&(traj.final_state().matrix() - traj.initial().matrix())).unwrap();
        assert!(rt < 0.5 * dist * dist);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_series(&[0.0, 5.0, 10.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(matches!(normalize_series(&[2.0, 2.0, 2.0]), Err(QslError::DegenerateRange(_))));
        let v = normalize_series(&[3.0, -1.0, 7.0, 2.0]).unwrap();
        assert_eq!(v[1], 0.0);
        assert_eq!(v[2], 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bounds_hold_and_map_under_order_swap(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = rng.random_range(0.05..0.95);
            let p = params(a, rng.random_range(a.max(1.0 - a)..=1.0));
            let traj = if rng.random_bool(0.5) {
                depolarizing_run(rng.random_range(0.05..0.9), rng.random_range(0.1..10.0), 1001)
            } else {
                let s = [0.5, 2.0, 10.0][rng.random_range(0..3)];
                let fam = amplitude_damping_family(AmplitudeDampingParams::new(1.0, s).unwrap());
                let rho0 = ghz_mixed(GhzMixedParams::new(rng.random_range(0.0..0.95)).unwrap()).unwrap();
                evolve_kraus(&fam, &rho0, rng.random_range(0.1..3.0), 1001).unwrap()
            };
            let b = match integrate_bounds(&traj, p) {
                Ok(b) => b,
                Err(QslError::QuadratureTooCoarse { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            prop_assert!(b.holds(1e-8));
            let b2 = integrate_bounds(&traj, p.swapped()).unwrap();
            // Skew symmetry: both sides rescale by α/(1−α) under α → 1−α.
            let skew = a / (1.0 - a);
            prop_assert!((b.rhs_fwd - skew * b2.rhs_bwd).abs() <= 1e-9 * b.rhs_fwd.max(1.0));
            prop_assert!((b.rhs_sym - skew * b2.rhs_sym).abs() <= 1e-9 * b.rhs_sym.max(1.0));
            let q = qsl_general_from(&b, traj.horizon()).unwrap();
            let q2 = qsl_general_from(&b2, traj.horizon()).unwrap();
            prop_assert!((q.tau_fwd - q2.tau_bwd).abs() <= 1e-9);
            prop_assert!((q.tau_qsl - q2.tau_qsl).abs() <= 1e-9);
            prop_assert!(q.tau_qsl <= traj.horizon() + 1e-8);
            prop_assert!(q.delta_qsl <= 1.0 && b.delta_bound <= 1.0);
        }

        #[test]
        fn phi_is_order_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho0 = sample::random_density_matrix(&mut rng, 2, 0.05);
            let rho_t = sample::random_density_matrix(&mut rng, 2, 0.01);
            let a = rng.random_range(0.05..0.95);
            let p = params(a, rng.random_range(a.max(1.0 - a)..=1.0));
            match (phi_func(&rho0, &rho_t, p), phi_func(&rho0, &rho_t, p.swapped())) {
                (Ok(x), Ok(y)) => prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0)),
                (Err(QslError::DenominatorNearZero { .. }), _) | (_, Err(QslError::DenominatorNearZero { .. })) => {}
                (x, y) => panic!("{x:?} {y:?}"),
            }
        }
    }
}
