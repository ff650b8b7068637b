//! α-z relative purity, α-z Rényi relative entropy and its named special cases.

use std::fmt;
use std::ops::Add;

use thiserror::Error;

use crate::linalg::{clamp_psd, eigh, support_power, ComplexMatrix, LinalgError, SUPPORT_TOL};
use crate::states::{support_contained, DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,
    #[error("invalid entropy parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<StateError> for EntropyError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::DimMismatch { left, right } => Self::DimMismatch { left, right },
            StateError::Linalg(l) => Self::Linalg(l),
            other => Self::InvalidParams(other.to_string()),
        }
    }
}

/// Order α ∈ (0,1) and power z > 0.
///
/// `dpi_valid` records whether 1 ≥ z ≥ max(α, 1−α), the region where the
/// entropy is monotone under channels and the upper bounds are proven.
/// Pairs outside it are still evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    alpha: f64,
    z: f64,
    dpi_valid: bool,
}

impl EntropyParams {
    pub fn new(alpha: f64, z: f64) -> Result<Self, EntropyError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(EntropyError::InvalidParams(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(EntropyError::InvalidParams(format!("z must be positive, got {z}")));
        }
        Ok(Self {
            alpha,
            z,
            dpi_valid: in_dpi_region(alpha, z),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dpi_valid(&self) -> bool {
        self.dpi_valid
    }

    /// (1−α, z).
    pub fn swapped(&self) -> Self {
        Self::new(1.0 - self.alpha, self.z).expect("1 - alpha stays in (0, 1)")
    }
}

/// 1 ≥ z ≥ max(α, 1−α), with a little slack for grid endpoints.
pub fn in_dpi_region(alpha: f64, z: f64) -> bool {
    let lo = alpha.max(1.0 - alpha);
    z <= 1.0 + 1e-12 && z + 1e-12 >= lo
}

/// A relative entropy value, possibly +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// The value as an f64, with +∞ for `Infinite`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Add for EntropyValue {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<(), EntropyError> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(EntropyError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        })
    }
}

/// Eigenvalues of D (V† A V) D where σ = V diag(λ) V† and D = diag(λ^e) on
/// the support. Working in σ's eigenbasis keeps the operator graded, so
/// eigenvalues many orders below the largest stay accurate.
fn graded_sandwich(sigma: &DensityMatrix, e: f64, a: &ComplexMatrix) -> Result<Vec<f64>, EntropyError> {
    let spec = sigma.spectrum();
    let v = &spec.vectors;
    let mut m = &(&v.adjoint() * a) * v;
    let d: Vec<f64> = spec.values.iter().map(|&l| support_power(l, e)).collect();
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= d[i] * d[j];
        }
    }
    Ok(clamp_psd(eigh(&m.hermitian_part())?)?.values)
}

/// Tr[(σ^{(1−α)/2z} ρ^{α/z} σ^{(1−α)/2z})^z] for any α ≠ 1, z > 0.
/// The caller has already checked supports.
fn purity_unchecked(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> Result<f64, EntropyError> {
    let values = graded_sandwich(sigma, (1.0 - alpha) / (2.0 * z), &rho.pow(alpha / z))?;
    Ok(values.iter().map(|&l| if l > 0.0 { l.powf(z) } else { 0.0 }).sum())
}

/// α-z relative purity g_{α,z}(ρ, σ).
pub fn relative_purity(rho: &DensityMatrix, sigma: &DensityMatrix, p: EntropyParams) -> Result<f64, EntropyError> {
    check_dims(rho, sigma)?;
    if !support_contained(rho, sigma)? {
        return Err(EntropyError::SupportViolation);
    }
    purity_unchecked(rho, sigma, p.alpha, p.z)
}

fn renyi_unchecked_order(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> Result<EntropyValue, EntropyError> {
    check_dims(rho, sigma)?;
    if !support_contained(rho, sigma)? {
        return Ok(EntropyValue::Infinite);
    }
    let g = purity_unchecked(rho, sigma, alpha, z)?;
    if g <= 0.0 {
        return Ok(EntropyValue::Infinite);
    }
    Ok(EntropyValue::Finite(g.ln() / (alpha - 1.0)))
}

/// α-z Rényi relative entropy D_{α,z}(ρ‖σ); +∞ when supp ρ ⊄ supp σ.
pub fn renyi_az(rho: &DensityMatrix, sigma: &DensityMatrix, p: EntropyParams) -> Result<EntropyValue, EntropyError> {
    renyi_unchecked_order(rho, sigma, p.alpha, p.z)
}

/// D_{α,z}(ρ‖σ) + D_{α,z}(σ‖ρ).
pub fn renyi_az_symmetrized(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: EntropyParams,
) -> Result<EntropyValue, EntropyError> {
    Ok(renyi_az(rho, sigma, p)? + renyi_az(sigma, rho, p)?)
}

/// Uhlmann fidelity Tr sqrt(sqrt(ρ) σ sqrt(ρ)).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, EntropyError> {
    check_dims(rho, sigma)?;
    let values = graded_sandwich(rho, 0.5, sigma.matrix())?;
    Ok(values.iter().map(|l| l.sqrt()).sum())
}

/// Tr(ρ^a σ^b), the Petz-type trace functional.
pub fn trace_power_product(rho: &DensityMatrix, sigma: &DensityMatrix, a: f64, b: f64) -> Result<f64, EntropyError> {
    check_dims(rho, sigma)?;
    Ok(rho.pow(a).trace_product(&sigma.pow(b))?.re)
}

/// Named members of the α-z family and related quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialCase {
    /// z = 1. Orders above one are accepted here so the α → 1 limit can be
    /// approached from both sides.
    Petz(f64),
    /// z = α, orders above one accepted as for `Petz`.
    Sandwiched(f64),
    /// Tr ρ(ln ρ − ln σ).
    Umegaki,
    /// −2 ln F(ρ, σ).
    MinRelative,
    /// ln of the largest eigenvalue of σ^{-1/2} ρ σ^{-1/2}.
    MaxRelative,
    /// F(ρ, σ) itself (not an entropy).
    Fidelity,
    /// D_{1/2,1} = −2 ln Tr(√ρ √σ).
    Affinity,
}

fn check_order(alpha: f64) -> Result<(), EntropyError> {
    if alpha > 0.0 && alpha.is_finite() && alpha != 1.0 {
        Ok(())
    } else {
        Err(EntropyError::InvalidParams(format!("order must be positive and != 1, got {alpha}")))
    }
}

pub fn special_case(rho: &DensityMatrix, sigma: &DensityMatrix, which: SpecialCase) -> Result<EntropyValue, EntropyError> {
    check_dims(rho, sigma)?;
    match which {
        SpecialCase::Petz(alpha) => {
            check_order(alpha)?;
            renyi_unchecked_order(rho, sigma, alpha, 1.0)
        }
        SpecialCase::Sandwiched(alpha) => {
            check_order(alpha)?;
            renyi_unchecked_order(rho, sigma, alpha, alpha)
        }
        SpecialCase::Affinity => renyi_unchecked_order(rho, sigma, 0.5, 1.0),
        SpecialCase::Fidelity => Ok(EntropyValue::Finite(fidelity(rho, sigma)?)),
        SpecialCase::MinRelative => {
            let f = fidelity(rho, sigma)?;
            Ok(if f > 0.0 {
                EntropyValue::Finite(-2.0 * f.ln())
            } else {
                EntropyValue::Infinite
            })
        }
        SpecialCase::Umegaki => {
            if !support_contained(rho, sigma)? {
                return Ok(EntropyValue::Infinite);
            }
            let neg_entropy: f64 = rho
                .eigenvalues()
                .iter()
                .map(|&l| if l > SUPPORT_TOL { l * l.ln() } else { 0.0 })
                .sum();
            let cross = rho.matrix().trace_product(&sigma.ln_on_support())?.re;
            Ok(EntropyValue::Finite(neg_entropy - cross))
        }
        SpecialCase::MaxRelative => {
            if !support_contained(rho, sigma)? {
                return Ok(EntropyValue::Infinite);
            }
            let s = sigma.pow(-0.5);
            let m = (&(&s * rho.matrix()) * &s).hermitian_part();
            let top = eigh(&m)?.max();
            Ok(EntropyValue::Finite(top.ln()))
        }
    }
}
