//! Spectral matrix functions on a small positive matrix.

use azqsl::linalg::{eigh, kron, mat_pow, mat_pow_integral, schatten_norm, ComplexMatrix, SchattenP, DEFAULT_QUAD_POINTS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ComplexMatrix::from_real(2, &[2.0, 0.5, 0.5, 1.0]);
    let es = eigh(&m)?;
    println!("eigenvalues: {:?}", es.values);

    let root = mat_pow(&m, 0.5)?;
    println!("|sqrt(m)^2 - m| = {:.2e}", (&(&root * &root) - &m).max_abs());

    // The integral representation of fractional powers agrees with the spectral path.
    let via_integral = mat_pow_integral(&m, 0.5, DEFAULT_QUAD_POINTS)?;
    println!("spectral vs integral: {:.2e}", (&root - &via_integral).max_abs());

    for p in [SchattenP::Finite(1.0), SchattenP::Finite(2.0), SchattenP::Infinity] {
        println!("{p:?} norm = {:.6}", schatten_norm(&m, p)?);
    }

    let pair = kron(&m, &ComplexMatrix::pauli_x());
    println!("tensor product dimension: {}", pair.dim());
    Ok(())
}
