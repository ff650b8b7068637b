//! Random matrices and states for property tests and Monte Carlo checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix with iid complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    ComplexMatrix::from_vec(dim, data)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_complex(rng, dim).hermitian_part()
}

/// Haar-random unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = random_complex(rng, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Random full-rank state: a Hilbert-Schmidt random state mixed with white
/// noise so that every eigenvalue is at least `floor`. Needs `floor·dim < 1`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, floor: f64) -> DensityMatrix {
    assert!(floor >= 0.0 && floor * (dim as f64) < 1.0, "floor too large for dimension");
    let g = random_complex(rng, dim);
    let w = &g * &g.adjoint();
    let w = w.scale_real(1.0 / w.trace().re);
    let mixed = &w.scale_real(1.0 - floor * dim as f64) + &ComplexMatrix::identity(dim).scale_real(floor);
    DensityMatrix::new(mixed.hermitian_part()).expect("convex mixture of states")
}

/// Radius uniform in `[r_min, r_max)`, direction uniform on the sphere; returns (r, θ, φ).
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> (f64, f64, f64) {
    let r = rng.random_range(r_min..r_max);
    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let phi = rng.random_range(0.0..2.0 * std::f64::consts::PI);
    (r, theta, phi)
}
