//! Dense complex-matrix kernel for the small (dim ≤ 16) operators used
//! throughout the crate.
//!
//! Everything here is a pure function of its inputs. Matrix functions
//! (powers, logarithms) go through the Hermitian eigendecomposition computed
//! by a cyclic complex Jacobi solver.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Maximum entrywise asymmetry |m - m†| accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in (-PSD_TOL, 0) are clamped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this value count as zero (outside the support).
pub const SUPPORT_TOL: f64 = 1e-12;
/// Sweep budget of the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default number of quadrature intervals for [`mat_pow_integral`].
pub const DEFAULT_QUAD_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix is singular (eigenvalue {eigenvalue:.3e} at or below the support tolerance)")]
    SingularMatrix { eigenvalue: f64 },
    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidP(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        assert_eq!(data.len(), dim * dim, "expected {} entries", dim * dim);
        Self { dim, data }
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Self {
        Self::from_vec(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::new(0.0, 1.0);
        Self::from_vec(2, vec![Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)])
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diag(&[1.0, -1.0])
    }

    /// Projector |v⟩⟨v| for a (not necessarily normalized) column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise comparison within an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// max |m_ij - conj(m_ji)|.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_asymmetry() <= tol
    }

    /// (m + m†)/2.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// self·other - other·self.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    fn check_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(LinalgError::DimMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64, LinalgError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// U diag(f(λ)) U†.
    pub fn map_spectrum<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let u = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in fv.iter().enumerate() {
                    if w != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    /// U diag(λ) U†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.dim() - 1]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigensystem, LinalgError> {
    let asymmetry = m.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { asymmetry });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let mut converged = n == 1;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Negligible against both diagonal entries: drop it.
                if sweep > 3 && app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs()
                {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] in the (p, q) plane.
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                // Direct diagonal updates keep small eigenvalues of graded
                // matrices accurate to working precision relative to themselves.
                a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigensystem { values, vectors })
}

/// Clamps tiny negative eigenvalues to zero, rejecting genuinely negative ones.
pub fn clamp_psd(mut es: HermitianEigensystem) -> Result<HermitianEigensystem, LinalgError> {
    if let Some(&lo) = es.values.first() {
        if lo < -PSD_TOL {
            return Err(LinalgError::NotPsd { min_eigenvalue: lo });
        }
    }
    for l in &mut es.values {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(es)
}

/// λ^s on the support, zero elsewhere (for every s, including s ≤ 0).
pub fn support_power(lambda: f64, s: f64) -> f64 {
    if lambda > SUPPORT_TOL {
        lambda.powf(s)
    } else {
        0.0
    }
}

/// Power of an eigensystem that has already been clamped to the PSD cone.
pub fn eig_pow(es: &HermitianEigensystem, s: f64) -> ComplexMatrix {
    es.map_spectrum(|l| support_power(l, s))
}

/// Real power of a positive semidefinite matrix via its spectrum; negative
/// exponents act as a generalized inverse on the support.
pub fn mat_pow(m: &ComplexMatrix, s: f64) -> Result<ComplexMatrix, LinalgError> {
    let es = clamp_psd(eigh(m)?)?;
    Ok(eig_pow(&es, s))
}

/// Power of a strictly positive matrix from its resolvent integral
/// `sin(πs)/π ∫₀^∞ x^{s-1} m (m + x)^{-1} dx`, evaluated with composite
/// Simpson on `x = u/(1-u)`. Only meant as an independent check of [`mat_pow`].
pub fn mat_pow_integral(
    m: &ComplexMatrix,
    s: f64,
    quad_points: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(LinalgError::InvalidArgument(format!(
            "integral representation needs 0 < s < 1, got {s}"
        )));
    }
    if quad_points < 2 {
        return Err(LinalgError::InvalidArgument(
            "at least two quadrature intervals are required".into(),
        ));
    }
    let es = clamp_psd(eigh(m)?)?;
    if es.min() <= SUPPORT_TOL {
        return Err(LinalgError::SingularMatrix {
            eigenvalue: es.min(),
        });
    }
    let n = m.dim();
    let intervals = quad_points + quad_points % 2;
    let h = 1.0 / intervals as f64;
    let eye = ComplexMatrix::identity(n);
    let herm = m.hermitian_part();
    let mut acc = ComplexMatrix::zeros(n);
    // The integrand in u behaves like u^{s-1} near 0 and (1-u)^{-s} near 1.
    // Grading u = B(v) with B' ∝ v^{G-1}(1-v)^{G-1} flattens both ends so that
    // Simpson converges at its usual rate; the end nodes contribute zero.
    for k in 1..intervals {
        let v = k as f64 * h;
        let u = graded(v);
        let one_minus_u = graded(1.0 - v);
        let x = u / one_minus_u;
        let jac = graded_density(v) / (one_minus_u * one_minus_u);
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        let inv = inverse_hpd(&(&herm + &eye.scale_real(x)))?;
        let term = (&herm * &inv).scale_real(weight * x.powf(s - 1.0) * jac);
        acc = &acc + &term;
    }
    Ok(acc.scale_real(h / 3.0 * (PI * s).sin() / PI))
}

const GRADING_ORDER: i32 = 8;

/// Regularized incomplete beta I_v(G, G) for integer G, as a binomial tail.
/// Symmetric: graded(1 - v) = 1 - graded(v), which keeps 1 - u accurate.
fn graded(v: f64) -> f64 {
    let n = 2 * GRADING_ORDER - 1;
    let w = 1.0 - v;
    let mut binom = 1.0;
    let mut total = 0.0;
    for j in 0..=n {
        if j >= GRADING_ORDER {
            total += binom * v.powi(j) * w.powi(n - j);
        }
        binom = binom * f64::from(n - j) / f64::from(j + 1);
    }
    total
}

fn graded_density(v: f64) -> f64 {
    // (2G-1)! / ((G-1)!)^2 · v^{G-1} (1-v)^{G-1}
    let g = GRADING_ORDER;
    let mut c = 1.0;
    for k in 1..=(2 * g - 1) {
        c *= f64::from(k);
    }
    for k in 1..g {
        c /= f64::from(k) * f64::from(k);
    }
    c * (v * (1.0 - v)).powi(g - 1)
}

/// Inverse of a Hermitian positive definite matrix by Gauss-Jordan elimination
/// with partial pivoting.
fn inverse_hpd(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = m.dim();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return Err(LinalgError::SingularMatrix { eigenvalue: 0.0 });
        }
        if pivot != col {
            for j in 0..n {
                let (x, y) = (a[(col, j)], a[(pivot, j)]);
                a[(col, j)] = y;
                a[(pivot, j)] = x;
                let (x, y) = (inv[(col, j)], inv[(pivot, j)]);
                inv[(col, j)] = y;
                inv[(pivot, j)] = x;
            }
        }
        let d = a[(col, col)].inv();
        for j in 0..n {
            a[(col, j)] *= d;
            inv[(col, j)] *= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let (acj, icj) = (a[(col, j)], inv[(col, j)]);
                a[(i, j)] -= f * acj;
                inv[(i, j)] -= f * icj;
            }
        }
    }
    Ok(inv)
}

/// Exponent of a Schatten norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenP {
    Finite(f64),
    Infinity,
}

/// Singular values, descending. Hermitian inputs use |eigenvalues| directly;
/// everything else goes through the eigenvalues of m†m.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let mut sv: Vec<f64> = if m.hermitian_asymmetry() <= 1e-14 * m.max_abs().max(1.0) {
        eigh(&m.hermitian_part())?.values.iter().map(|l| l.abs()).collect()
    } else {
        let gram = &m.adjoint() * m;
        eigh(&gram.hermitian_part())?
            .values
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn schatten_norm(m: &ComplexMatrix, p: SchattenP) -> Result<f64, LinalgError> {
    let sv = singular_values(m)?;
    match p {
        SchattenP::Infinity => Ok(sv.first().copied().unwrap_or(0.0)),
        SchattenP::Finite(p) if p < 1.0 || p.is_nan() => Err(LinalgError::InvalidP(p)),
        SchattenP::Finite(p) if p == 1.0 => Ok(sv.iter().sum()),
        SchattenP::Finite(p) if p.is_infinite() => Ok(sv.first().copied().unwrap_or(0.0)),
        SchattenP::Finite(p) => Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)),
    }
}

/// Trace norm ‖m‖₁.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    schatten_norm(m, SchattenP::Finite(1.0))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Unitary exp(-i t h) for Hermitian h, from its eigensystem.
pub fn unitary_propagator(es: &HermitianEigensystem, t: f64) -> ComplexMatrix {
    let n = es.dim();
    let u = &es.vectors;
    let phases: Vec<Complex64> = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ph) in phases.iter().enumerate() {
                acc += u[(i, k)] * ph * u[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_identity() {
        let es = eigh(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(es.values, vec![1.0, 1.0]);
        assert!(es.vectors.approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn eigh_pauli_x() {
        let es = eigh(&ComplexMatrix::pauli_x()).unwrap();
        assert_abs_diff_eq!(es.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.values[1], 1.0, epsilon = 1e-15);
        assert!(es.reconstruct().approx_eq(&ComplexMatrix::pauli_x(), 1e-14));
    }

    #[test]
    fn eigh_diagonal() {
        let es = eigh(&ComplexMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
        assert_eq!(es.values, vec![0.25, 0.75]);
    }

    #[test]
    fn eigh_pauli_y_complex_entries() {
        let es = eigh(&ComplexMatrix::pauli_y()).unwrap();
        assert_abs_diff_eq!(es.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.values[1], 1.0, epsilon = 1e-15);
        let u = &es.vectors;
        assert!((&u.adjoint() * u).approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_vec(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(eigh(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn mat_pow_examples() {
        let id = ComplexMatrix::identity(2);
        assert!(mat_pow(&id, 0.37).unwrap().approx_eq(&id, 1e-15));
        let m = mat_pow(&ComplexMatrix::from_real_diag(&[4.0, 9.0]), 0.5).unwrap();
        assert!(m.approx_eq(&ComplexMatrix::from_real_diag(&[2.0, 3.0]), 1e-14));
        let m = mat_pow(&ComplexMatrix::from_real_diag(&[0.25, 0.75]), 0.5).unwrap();
        assert!(m.approx_eq(&ComplexMatrix::from_real_diag(&[0.5, 0.75_f64.sqrt()]), 1e-15));
    }

    #[test]
    fn mat_pow_on_support_only() {
        let proj = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(mat_pow(&proj, -0.5).unwrap().approx_eq(&proj, 1e-15));
        assert!(mat_pow(&proj, 0.0).unwrap().approx_eq(&proj, 1e-15));
    }

    #[test]
    fn mat_pow_clamps_rounding_but_rejects_negative() {
        let slightly = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        let out = mat_pow(&slightly, 0.5).unwrap();
        assert!(out.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-15));
        let negative = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(mat_pow(&negative, 0.5), Err(LinalgError::NotPsd { .. })));
    }

    #[test]
    fn mat_pow_integral_examples() {
        let m = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let quad = mat_pow_integral(&m, 0.5, DEFAULT_QUAD_POINTS).unwrap();
        assert!(quad.approx_eq(&mat_pow(&m, 0.5).unwrap(), 1e-6));

        let id = ComplexMatrix::identity(2);
        assert!(mat_pow_integral(&id, 0.5, DEFAULT_QUAD_POINTS)
            .unwrap()
            .approx_eq(&id, 1e-6));

        let half = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        let want = 0.5_f64.powf(0.37);
        assert!(mat_pow_integral(&half, 0.37, DEFAULT_QUAD_POINTS)
            .unwrap()
            .approx_eq(&ComplexMatrix::from_real_diag(&[want, want]), 1e-6));
    }

    #[test]
    fn mat_pow_integral_rejects_singular() {
        let proj = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(
            mat_pow_integral(&proj, 0.5, 100),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn schatten_examples() {
        let z = ComplexMatrix::pauli_z();
        assert_abs_diff_eq!(schatten_norm(&z, SchattenP::Finite(1.0)).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(schatten_norm(&z, SchattenP::Infinity).unwrap(), 1.0, epsilon = 1e-15);
        let d = ComplexMatrix::from_real_diag(&[3.0, -4.0]);
        assert_abs_diff_eq!(schatten_norm(&d, SchattenP::Finite(1.0)).unwrap(), 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(schatten_norm(&d, SchattenP::Finite(2.0)).unwrap(), 5.0, epsilon = 1e-14);
        assert!(matches!(
            schatten_norm(&d, SchattenP::Finite(0.5)),
            Err(LinalgError::InvalidP(_))
        ));
    }

    #[test]
    fn schatten_non_hermitian() {
        // |0><1| has a single singular value 1.
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(trace_norm(&m).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kron_examples() {
        let id = ComplexMatrix::identity(2);
        assert!(kron(&id, &id).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let zi = kron(&ComplexMatrix::pauli_z(), &id);
        assert!(zi.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]), 0.0));
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let mut want = ComplexMatrix::zeros(4);
        want[(1, 1)] = c(1.0, 0.0);
        assert!(kron(&p0, &p1).approx_eq(&want, 0.0));
    }

    #[test]
    fn propagator_is_unitary() {
        let h = &ComplexMatrix::pauli_x().scale_real(0.3) + &ComplexMatrix::pauli_y().scale_real(-1.1);
        let es = eigh(&h).unwrap();
        let u = unitary_propagator(&es, 0.7);
        assert!((&u.adjoint() * &u).approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn integral_form_matches_spectral_path_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 4] {
            for _ in 0..5 {
                let rho = sample::random_density_matrix(&mut rng, dim, 0.02);
                for s in [0.25, 0.5, 0.75] {
                    let a = mat_pow(rho.matrix(), s).unwrap();
                    let b = mat_pow_integral(rho.matrix(), s, DEFAULT_QUAD_POINTS).unwrap();
                    assert!(a.approx_eq(&b, 1e-6), "s={s} dim={dim}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn eigh_reconstructs(seed in any::<u64>(), dim in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample::random_hermitian(&mut rng, dim);
            let es = eigh(&m).unwrap();
            prop_assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
            let err = (&es.reconstruct() - &m).max_abs();
            prop_assert!(err <= 1e-12 * dim as f64, "reconstruction error {}", err);
            let u = &es.vectors;
            prop_assert!((&u.adjoint() * u).approx_eq(&ComplexMatrix::identity(dim), 1e-12));
        }

        #[test]
        fn mat_pow_identities(seed in any::<u64>(), dim in 1usize..=4, a in 0.05f64..=1.0, b in 0.05f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = sample::random_density_matrix(&mut rng, dim, 1e-3);
            let m = rho.matrix();
            prop_assert!(mat_pow(m, 1.0).unwrap().approx_eq(m, 1e-12));
            prop_assert!(mat_pow(m, 0.0).unwrap().approx_eq(&ComplexMatrix::identity(dim), 1e-12));
            let nested = mat_pow(&mat_pow(m, a).unwrap(), b).unwrap();
            prop_assert!(nested.approx_eq(&mat_pow(m, a * b).unwrap(), 1e-10));
        }

        #[test]
        fn trace_norm_dominates_trace(seed in any::<u64>(), dim in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample::random_hermitian(&mut rng, dim);
            prop_assert!(trace_norm(&m).unwrap() + 1e-12 >= m.trace().norm());
        }

        #[test]
        fn holder_trace_inequality(seed in any::<u64>(), dim in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_complex(&mut rng, dim);
            let b = sample::random_complex(&mut rng, dim);
            let lhs = a.adjoint().trace_product(&b).unwrap().norm();
            let rhs = schatten_norm(&a, SchattenP::Infinity).unwrap() * trace_norm(&b).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }
}
