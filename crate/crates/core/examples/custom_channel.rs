//! A user-defined dephasing channel supplied as closures.

use azqsl::dynamics::{evolve_kraus, ClosureKraus};
use azqsl::entropy::EntropyParams;
use azqsl::linalg::ComplexMatrix;
use azqsl::qsl::{qsl_general, qsl_nonunitary_on};
use azqsl::states::{bloch_state, BlochVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 0.8;
    // Mixing angle rises smoothly from 0 to π/4 (full dephasing).
    // Writing the weights as cos/sin keeps dK/dt bounded at t = 0.
    let dephasing = ClosureKraus::new(2, move |t| {
        let angle = std::f64::consts::FRAC_PI_4 * (1.0 - (-rate * t).exp());
        vec![
            ComplexMatrix::identity(2).scale_real(angle.cos()),
            ComplexMatrix::pauli_z().scale_real(angle.sin()),
        ]
    });
    let rho0 = bloch_state(BlochVector::new(0.6, std::f64::consts::FRAC_PI_2, 0.0)?)?;
    let traj = evolve_kraus(&dephasing, &rho0, 2.0, 2001)?;
    let p = EntropyParams::new(0.4, 0.9)?;
    // Derivatives were not given, so the Kraus speed comes from finite differences.
    let kraus = qsl_nonunitary_on(&traj, p)?;
    let general = qsl_general(&traj, p)?;
    println!("Kraus-norm bound:  tau_qsl = {:.6}", kraus.tau_qsl);
    println!("state-speed bound: tau_qsl = {:.6}", general.tau_qsl);
    Ok(())
}
