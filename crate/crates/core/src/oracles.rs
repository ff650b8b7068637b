//! Closed-form results for the single-qubit and two-qubit worked examples.
//!
//! Everything here is scalar arithmetic. Nothing calls into the matrix code,
//! so agreement with the generic pipeline is a genuine cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::entropy::EntropyParams;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("probe has no coherence in the energy basis; the state does not move")]
    ZeroVariance,
    #[error("invalid case: {0}")]
    InvalidCase(String),
}

/// Which of the two ξ combinations to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiSign {
    Plus,
    Minus,
}

/// ξ_s^± = 2^{−s}[(1+r)^s ± (1−r)^s].
pub fn xi(s_exp: f64, r: f64, sign: XiSign) -> f64 {
    let (a, b) = ((1.0 + r).powf(s_exp), (1.0 - r).powf(s_exp));
    let sum = match sign {
        XiSign::Plus => a + b,
        XiSign::Minus => a - b,
    };
    2f64.powf(-s_exp) * sum
}

/// Qubit probe (r, θ, φ) under H = n⃗·σ⃗, observed at time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitUnitaryCase {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub n: [f64; 3],
    pub t: f64,
}

impl QubitUnitaryCase {
    pub fn new(r: f64, theta: f64, phi: f64, n: [f64; 3], t: f64) -> Result<Self, OracleError> {
        if !(0.0..1.0).contains(&r) {
            return Err(OracleError::InvalidCase(format!("r = {r} outside [0, 1)")));
        }
        let case = Self { r, theta, phi, n, t };
        if case.field_norm() <= 0.0 {
            return Err(OracleError::InvalidCase("field vector is zero".into()));
        }
        Ok(case)
    }

    pub fn field_norm(&self) -> f64 {
        self.n.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// cos ϑ = n̂·r̂.
    pub fn cos_vartheta(&self) -> f64 {
        let r_hat = [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ];
        let dot: f64 = self.n.iter().zip(r_hat).map(|(a, b)| a * b).sum();
        (dot / self.field_norm()).clamp(-1.0, 1.0)
    }

    /// ΔH = ‖n⃗‖ √(1 − r² cos²ϑ).
    pub fn energy_spread(&self) -> f64 {
        let c = self.cos_vartheta();
        self.field_norm() * (1.0 - self.r * self.r * c * c).sqrt()
    }

    /// Times m π/‖n⃗‖ at which the state returns to the probe.
    pub fn revival_time(&self, m: u32) -> f64 {
        m as f64 * PI / self.field_norm()
    }
}

/// ε_{α,z}(t).
pub fn unitary_epsilon(case: &QubitUnitaryCase, p: EntropyParams) -> f64 {
    let (a, z, r) = (p.alpha(), p.z(), case.r);
    let c = case.cos_vartheta();
    let sin_nt = (case.field_norm() * case.t).sin();
    0.5 * (xi(1.0 / z, r, XiSign::Plus)
        - xi(a / z, r, XiSign::Minus) * xi((1.0 - a) / z, r, XiSign::Minus) * (1.0 - c * c) * sin_nt * sin_nt)
}

/// α-z relative purity g(ρ_t, ρ₀) for unitary qubit evolution.
pub fn unitary_purity(case: &QubitUnitaryCase, p: EntropyParams) -> f64 {
    let z = p.z();
    let eps = unitary_epsilon(case, p);
    let x = (1.0 - case.r * case.r).powf(1.0 / z) / (2f64.powf(2.0 / z) * eps * eps);
    let root = (1.0 - x).max(0.0).sqrt();
    eps.powf(z) * ((1.0 - root).powf(z) + (1.0 + root).powf(z))
}

/// Forward Petz (z = 1) unitary speed limit at horizon `case.t`.
pub fn unitary_tau_petz(case: &QubitUnitaryCase, alpha: f64) -> Result<f64, OracleError> {
    let c = case.cos_vartheta();
    if (1.0 - c * c).sqrt() < 1e-12 {
        return Err(OracleError::ZeroVariance);
    }
    let p = EntropyParams::new(alpha, 1.0).map_err(|e| OracleError::InvalidCase(e.to_string()))?;
    let r = case.r;
    let g = unitary_purity(case, p);
    let chain = (1.0 + (1.0 - alpha) * ((1.0 - r) / 2.0).ln()).abs();
    let denom = 2.0 * alpha * (1.0 + r).powf(1.0 - alpha) * (1.0 - r).powf(alpha - 1.0) * case.energy_spread();
    Ok((-chain * g.ln() / denom).max(0.0))
}

/// Ratio of the Schatten-1 Petz speed limit to its Schatten-2 counterpart.
pub fn omega_ratio(alpha: f64, r: f64, vartheta: f64) -> f64 {
    let c = vartheta.cos();
    xi(alpha, r, XiSign::Minus) * xi(2.0 - 2.0 * alpha, r, XiSign::Plus).sqrt() * vartheta.sin()
        / (alpha * (2.0 * (1.0 - r * r * c * c)).sqrt())
        * ((1.0 - r) / (1.0 + r)).powf(1.0 - alpha)
}

/// h_{α,z} for a qubit of Bloch radius r.
pub fn qubit_h(r: f64, p: EntropyParams) -> f64 {
    let (a, z) = (p.alpha(), p.z());
    ((1.0 + r) * (1.0 - r).powf(z - 1.0)).powf((1.0 - a) / z)
        / (2f64.powf(1.0 - a) * (1.0 + (1.0 - a) * ((1.0 - r) / 2.0).ln()).abs())
}

/// Qubit of Bloch radius r under the depolarizing channel for a dimensionless time Γτ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingCase {
    pub r: f64,
    pub gamma_tau: f64,
}

impl DepolarizingCase {
    pub fn new(r: f64, gamma_tau: f64) -> Result<Self, OracleError> {
        if !(0.0..1.0).contains(&r) {
            return Err(OracleError::InvalidCase(format!("r = {r} outside [0, 1)")));
        }
        if !(gamma_tau >= 0.0) {
            return Err(OracleError::InvalidCase(format!("gamma_tau = {gamma_tau} is negative")));
        }
        Ok(Self { r, gamma_tau })
    }

    fn contracted(&self) -> f64 {
        (-self.gamma_tau).exp() * self.r
    }

    /// The two sides of the logarithm: (1−r)^{α−1}(1+e^{−Γτ}r)^α + (1+r)^{α−1}(1−e^{−Γτ}r)^α
    /// and 2(1−r²)^{α−1}.
    fn log_arguments(&self, alpha: f64) -> (f64, f64) {
        let (r, u) = (self.r, self.contracted());
        let mixed = (1.0 - r).powf(alpha - 1.0) * (1.0 + u).powf(alpha)
            + (1.0 + r).powf(alpha - 1.0) * (1.0 - u).powf(alpha);
        (mixed, 2.0 * (1.0 - r * r).powf(alpha - 1.0))
    }
}

/// D_{α,z}(ρ_τ‖ρ₀) under depolarizing noise; z does not enter.
pub fn depolarizing_entropy(case: &DepolarizingCase, alpha: f64) -> f64 {
    let (mixed, reference) = case.log_arguments(alpha);
    (mixed / reference).ln() / (alpha - 1.0)
}

/// Γτ → ∞ value of [`depolarizing_entropy`].
pub fn depolarizing_entropy_limit(r: f64, alpha: f64) -> f64 {
    let g = 0.5 * ((1.0 - r).powf(1.0 - alpha) + (1.0 + r).powf(1.0 - alpha));
    g.ln() / (alpha - 1.0)
}

/// Leading small-Γτ behaviour α r² (Γτ)² / (2(1 − r²)).
pub fn depolarizing_entropy_quadratic(case: &DepolarizingCase, alpha: f64) -> f64 {
    let r = case.r;
    alpha * r * r * case.gamma_tau.powi(2) / (2.0 * (1.0 - r * r))
}

/// Forward Kraus speed limit for depolarizing noise, in units of 1/Γ.
pub fn depolarizing_tau(case: &DepolarizingCase, p: EntropyParams) -> f64 {
    if case.gamma_tau == 0.0 {
        return 0.0;
    }
    let (a, z, r) = (p.alpha(), p.z(), case.r);
    let (mixed, reference) = case.log_arguments(a);
    let chain = (1.0 + (1.0 - a) * ((1.0 - r) / 2.0).ln()).abs();
    let spectral = ((1.0 - r).powf(z - 1.0) * (1.0 + r)).powf((1.0 - a) / z);
    let swept = (1.0 - case.contracted()).powf(a) - (1.0 - r).powf(a);
    2.0 * case.gamma_tau * r * chain * (reference / mixed).ln() / (3.0 * spectral * swept)
}

/// Two qubits in the GHZ mixture of weight p under local amplitude damping.
/// Times are measured in units of 1/λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitAdCase {
    pub p: f64,
    pub lambda_tau: f64,
    pub s: f64,
}

impl TwoQubitAdCase {
    pub fn new(p: f64, lambda_tau: f64, s: f64) -> Result<Self, OracleError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(OracleError::InvalidCase(format!("p = {p} outside [0, 1]")));
        }
        if !(lambda_tau >= 0.0) || !(s >= 0.0) {
            return Err(OracleError::InvalidCase("lambda_tau and s must be nonnegative".into()));
        }
        Ok(Self { p, lambda_tau, s })
    }
}

/// sinh(x)/x with the removable singularity filled in.
fn sinhc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        Complex64::new(1.0, 0.0) + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Decoherence function γ at dimensionless time λt. Written with
/// q = √(1 − 2s) continued to imaginary values, so one expression covers
/// the decaying and the oscillating regime.
pub fn ad_gamma(lambda_t: f64, s: f64) -> f64 {
    let q = Complex64::new(1.0 - 2.0 * s, 0.0).sqrt();
    let half = lambda_t / 2.0;
    let x = q * half;
    ((-half).exp() * (x.cosh() + half * sinhc(x))).re
}

/// dγ/d(λt) = −s (λt/2) e^{−λt/2} sinh(x)/x.
pub fn ad_gamma_rate(lambda_t: f64, s: f64) -> f64 {
    let q = Complex64::new(1.0 - 2.0 * s, 0.0).sqrt();
    let half = lambda_t / 2.0;
    (-s * half * (-half).exp() * sinhc(q * half)).re
}

/// Smallest eigenvalue of the evolved two-qubit state.
pub fn ad_kmin(case: &TwoQubitAdCase) -> f64 {
    let p = case.p;
    let g2 = ad_gamma(case.lambda_tau, case.s).powi(2);
    let root = (1.0 - g2 * (2.0 - (1.0 + p * p) * g2)).max(0.0).sqrt();
    (0.5 * (1.0 - root - 0.5 * g2 * (2.0 - (1.0 + p) * g2))).max(0.0)
}

/// Σ_{jl} ‖K_jl ρ₀ dK_jl†/dt‖₁ in units of λ.
pub fn ad_kraus_norm_sum(case: &TwoQubitAdCase) -> f64 {
    let p = case.p;
    let g = ad_gamma(case.lambda_tau, case.s);
    let dg = ad_gamma_rate(case.lambda_tau, case.s);
    let g2 = g * g;
    0.5 * (g * dg).abs()
        * (2.0 * (1.0 - p)
            + (1.0 + p) * ((1.0 - g2).abs() + (1.0 - 2.0 * g2).abs())
            + (4.0 * p * p + (1.0 + p).powi(2) * g2 * g2).sqrt())
}
