//! Validated density matrices and the two probe-state families: single-qubit
//! Bloch states and the two-qubit GHZ state mixed with white noise.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{self, BufRead};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    clamp_psd, eig_pow, eigh, ComplexMatrix, HermitianEigensystem, LinalgError, HERMITIAN_TOL,
    SUPPORT_TOL,
};

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Squared overlap with a null space below which a vector counts as orthogonal to it.
pub const SUPPORT_OVERLAP_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0:.12}, expected 1")]
    BadTrace(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Bloch radius {0} exceeds 1")]
    InvalidBloch(f64),
    #[error("mixing weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("state file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Hermitian, positive semidefinite, unit-trace matrix with its spectrum cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    spectrum: HermitianEigensystem,
}

impl DensityMatrix {
    /// Validates `mat` and caches its clamped eigendecomposition.
    pub fn new(mat: ComplexMatrix) -> Result<Self, StateError> {
        let asym = mat.hermitian_asymmetry();
        if asym > HERMITIAN_TOL {
            return Err(StateError::NotHermitian(asym));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(StateError::BadTrace(tr));
        }
        let spectrum = clamp_psd(eigh(&mat)?)?;
        Ok(Self { mat, spectrum })
    }

    /// Accepts a matrix that is a state up to rounding, renormalizing the trace.
    /// Used for channel outputs whose trace drifts by a few ulps.
    pub(crate) fn from_channel_output(mat: ComplexMatrix) -> Result<Self, StateError> {
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > 1e-8 {
            return Err(StateError::BadTrace(tr));
        }
        Self::new(mat.hermitian_part().scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
            .expect("I/d is a valid state")
    }

    /// |ψ⟩⟨ψ| for a nonzero vector, normalized here.
    pub fn pure(psi: &[Complex64]) -> Result<Self, StateError> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(StateError::Parse("zero state vector".into()));
        }
        Self::new(ComplexMatrix::outer(psi).scale_real(1.0 / norm2))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn spectrum(&self) -> &HermitianEigensystem {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn k_min(&self) -> f64 {
        self.spectrum.min()
    }

    pub fn k_max(&self) -> f64 {
        self.spectrum.max()
    }

    /// True when some eigenvalue is at or below the support tolerance.
    pub fn is_rank_deficient(&self) -> bool {
        self.k_min() <= SUPPORT_TOL
    }

    pub fn is_pure(&self) -> bool {
        (self.k_max() - 1.0).abs() <= 1e-10
    }

    /// Matrix power on the support, from the cached spectrum.
    pub fn pow(&self, s: f64) -> ComplexMatrix {
        eig_pow(&self.spectrum, s)
    }

    /// Matrix logarithm restricted to the support (zero on the kernel).
    pub fn ln_on_support(&self) -> ComplexMatrix {
        self.spectrum
            .map_spectrum(|l| if l > SUPPORT_TOL { l.ln() } else { 0.0 })
    }

    /// Tr(ρ O) for a Hermitian observable, real part.
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<f64, LinalgError> {
        Ok(self.mat.trace_product(observable)?.re)
    }

    /// V ρ V†.
    pub fn conjugate_by(&self, v: &ComplexMatrix) -> Result<Self, StateError> {
        self.check_dim(v.dim())?;
        Self::from_channel_output(&(v * &self.mat) * &v.adjoint())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_channel_output(crate::linalg::kron(&self.mat, &other.mat))
            .expect("tensor product of states is a state")
    }

    fn check_dim(&self, other: usize) -> Result<(), StateError> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(StateError::DimMismatch {
                left: self.dim(),
                right: other,
            })
        }
    }

    /// Text form: the dimension on the first line, then one "re im" line per
    /// entry in row-major order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.dim());
        for z in self.mat.as_slice() {
            let _ = writeln!(out, "{:.17e} {:.17e}", z.re, z.im);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, StateError> {
        Self::read(io::Cursor::new(text))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, StateError> {
        let mut lines = reader
            .lines()
            .map(|l| l.map(|s| s.trim().to_owned()))
            .filter(|l| !matches!(l, Ok(s) if s.is_empty() || s.starts_with('#')));
        let first = lines
            .next()
            .ok_or_else(|| StateError::Parse("empty input".into()))??;
        let dim: usize = first
            .parse()
            .map_err(|_| StateError::Parse(format!("bad dimension line {first:?}")))?;
        if dim == 0 {
            return Err(StateError::Parse("dimension must be positive".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for k in 0..dim * dim {
            let line = lines.next().ok_or_else(|| {
                StateError::Parse(format!("expected {} entries, found {k}", dim * dim))
            })??;
            let mut parts = line.split_whitespace();
            let mut num = |what: &str| -> Result<f64, StateError> {
                parts
                    .next()
                    .ok_or_else(|| StateError::Parse(format!("entry {k}: missing {what} part")))?
                    .parse()
                    .map_err(|_| StateError::Parse(format!("entry {k}: bad number in {line:?}")))
            };
            let re = num("real")?;
            let im = num("imaginary")?;
            data.push(Complex64::new(re, im));
        }
        if let Some(extra) = lines.next() {
            return Err(StateError::Parse(format!("trailing data {:?}", extra?)));
        }
        Self::new(ComplexMatrix::from_vec(dim, data))
    }

    pub fn load(path: &Path) -> Result<Self, StateError> {
        let file = std::fs::File::open(path)?;
        Self::read(io::BufReader::new(file))
    }

    pub fn save(&self, path: &Path) -> Result<(), StateError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Spherical Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochVector {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self, StateError> {
        if !(0.0..=1.0 + 1e-12).contains(&r) || !r.is_finite() {
            return Err(StateError::InvalidBloch(r));
        }
        Ok(Self {
            r: r.min(1.0),
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    pub fn is_pure(&self) -> bool {
        (self.r - 1.0).abs() <= 1e-12
    }
}

/// (I + r⃗·σ⃗)/2.
pub fn bloch_state(b: BlochVector) -> Result<DensityMatrix, StateError> {
    if b.r > 1.0 + 1e-12 {
        return Err(StateError::InvalidBloch(b.r));
    }
    let [x, y, z] = b.cartesian();
    Ok(bloch_from_cartesian([x, y, z]))
}

/// (I + v·σ⃗)/2 for a Cartesian vector with |v| ≤ 1. The eigenvalues are
/// written in directly so they are exact even for nearly pure states.
pub(crate) fn bloch_from_cartesian(v: [f64; 3]) -> DensityMatrix {
    let [x, y, z] = v;
    let half = |re: f64, im: f64| Complex64::new(0.5 * re, 0.5 * im);
    let mat = ComplexMatrix::from_vec(2, vec![half(1.0 + z, 0.0), half(x, -y), half(x, y), half(1.0 - z, 0.0)]);
    DensityMatrix::new(mat).expect("Bloch vector within the unit ball")
}

/// Weight of the GHZ component in the noisy two-qubit probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzMixedParams {
    pub p: f64,
}

impl GhzMixedParams {
    pub fn new(p: f64) -> Result<Self, StateError> {
        if !(-1e-12..=1.0 + 1e-12).contains(&p) || !p.is_finite() {
            return Err(StateError::InvalidWeight(p));
        }
        Ok(Self { p: p.clamp(0.0, 1.0) })
    }

    pub fn is_separable(&self) -> bool {
        self.p <= 1.0 / 3.0
    }
}

/// (1−p)/4 · I⊗I + p |GHZ⟩⟨GHZ| with |GHZ⟩ = (|00⟩ + |11⟩)/√2.
pub fn ghz_mixed(g: GhzMixedParams) -> Result<DensityMatrix, StateError> {
    let p = g.p;
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(StateError::InvalidWeight(p));
    }
    let mut m = ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] += Complex64::new(p / 2.0, 0.0);
    }
    DensityMatrix::new(m)
}

/// supp a ⊆ supp b: every eigenvector of `a` on its support has negligible
/// weight on the kernel of `b`.
pub fn support_contained(a: &DensityMatrix, b: &DensityMatrix) -> Result<bool, StateError> {
    a.check_dim(b.dim())?;
    let sa = a.spectrum();
    let sb = b.spectrum();
    let kernel: Vec<usize> = (0..sb.dim()).filter(|&k| sb.values[k] <= SUPPORT_TOL).collect();
    if kernel.is_empty() {
        return Ok(true);
    }
    for i in (0..sa.dim()).filter(|&i| sa.values[i] > SUPPORT_TOL) {
        let v = sa.vector(i);
        let weight: f64 = kernel
            .iter()
            .map(|&k| {
                let w = sb.vector(k);
                w.iter().zip(&v).map(|(wj, vj)| wj.conj() * vj).sum::<Complex64>().norm_sqr()
            })
            .sum();
        if weight >= SUPPORT_OVERLAP_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ket0() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.0, 0.0])).unwrap()
    }

    #[test]
    fn bloch_examples() {
        let mixed = bloch_state(BlochVector::new(0.0, 0.3, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(mixed.k_min(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mixed.k_max(), 0.5, epsilon = 1e-15);

        for (theta, phi) in [(0.0, 0.0), (1.1, 2.3), (PI, 5.0)] {
            let rho = bloch_state(BlochVector::new(0.75, theta, phi).unwrap()).unwrap();
            assert_abs_diff_eq!(rho.k_min(), 0.125, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.k_max(), 0.875, epsilon = 1e-12);
        }

        let pole = bloch_state(BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(pole.matrix().approx_eq(ket0().matrix(), 1e-15));
        assert!(pole.is_pure());
    }

    #[test]
    fn bloch_rejects_long_vectors() {
        assert!(matches!(BlochVector::new(1.01, 0.0, 0.0), Err(StateError::InvalidBloch(_))));
        let raw = BlochVector { r: 1.5, theta: 0.0, phi: 0.0 };
        assert!(matches!(bloch_state(raw), Err(StateError::InvalidBloch(_))));
    }

    #[test]
    fn ghz_examples() {
        let white = ghz_mixed(GhzMixedParams::new(0.0).unwrap()).unwrap();
        for &l in white.eigenvalues() {
            assert_abs_diff_eq!(l, 0.25, epsilon = 1e-15);
        }
        let sep = ghz_mixed(GhzMixedParams::new(0.25).unwrap()).unwrap();
        assert_abs_diff_eq!(sep.k_min(), 3.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sep.k_max(), 7.0 / 16.0, epsilon = 1e-12);
        assert!(GhzMixedParams::new(0.25).unwrap().is_separable());

        let ent = ghz_mixed(GhzMixedParams::new(0.9).unwrap()).unwrap();
        assert_abs_diff_eq!(ent.k_min(), 1.0 / 40.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ent.k_max(), 37.0 / 40.0, epsilon = 1e-12);
        assert!(!GhzMixedParams::new(0.9).unwrap().is_separable());

        assert!(matches!(GhzMixedParams::new(1.2), Err(StateError::InvalidWeight(_))));
    }

    #[test]
    fn support_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(support_contained(&ket0(), &mixed).unwrap());
        assert!(!support_contained(&mixed, &ket0()).unwrap());
        assert!(support_contained(&ket0(), &ket0()).unwrap());
        let four = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            support_contained(&ket0(), &four),
            Err(StateError::DimMismatch { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let bad_trace = ComplexMatrix::from_real_diag(&[0.5, 0.6]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(StateError::BadTrace(_))));
        let negative = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(StateError::Linalg(LinalgError::NotPsd { .. }))
        ));
        let skew = ComplexMatrix::from_real(2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(matches!(DensityMatrix::new(skew), Err(StateError::NotHermitian(_))));
    }

    #[test]
    fn text_round_trip() {
        let rho = bloch_state(BlochVector::new(0.6, 0.7, 2.9).unwrap()).unwrap();
        let back = DensityMatrix::from_text(&rho.to_text()).unwrap();
        assert!(back.matrix().approx_eq(rho.matrix(), 0.0));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.txt");
        rho.save(&path).unwrap();
        let loaded = DensityMatrix::load(&path).unwrap();
        assert!(loaded.matrix().approx_eq(rho.matrix(), 0.0));
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(DensityMatrix::from_text(""), Err(StateError::Parse(_))));
        assert!(matches!(DensityMatrix::from_text("2\n1 0\n0 0\n"), Err(StateError::Parse(_))));
        assert!(matches!(
            DensityMatrix::from_text("1\n1 0\n5 5\n"),
            Err(StateError::Parse(_))
        ));
        let one = DensityMatrix::from_text("# comment\n1\n1.0 0.0\n").unwrap();
        assert_eq!(one.dim(), 1);
    }

    proptest! {
        #[test]
        fn bloch_spectrum(r in 0.0f64..=1.0, theta in 0.0f64..=PI, phi in 0.0f64..(2.0 * PI)) {
            let rho = bloch_state(BlochVector::new(r, theta, phi).unwrap()).unwrap();
            prop_assert!((rho.k_min() - (1.0 - r) / 2.0).abs() <= 1e-12);
            prop_assert!((rho.k_max() - (1.0 + r) / 2.0).abs() <= 1e-12);
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn ghz_spectrum(p in 0.0f64..=1.0) {
            let rho = ghz_mixed(GhzMixedParams::new(p).unwrap()).unwrap();
            let ev = rho.eigenvalues();
            for &l in &ev[..3] {
                prop_assert!((l - (1.0 - p) / 4.0).abs() <= 1e-12);
            }
            prop_assert!((ev[3] - (1.0 + 3.0 * p) / 4.0).abs() <= 1e-12);
            prop_assert!(rho.k_min() <= 0.25 + 1e-15 && rho.k_max() >= 0.25 - 1e-15);
        }
    }
}
