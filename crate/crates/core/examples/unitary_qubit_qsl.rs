//! Speed limit of a precessing qubit, against its closed form.

use azqsl::dynamics::{evolve_unitary, HamiltonianModel};
use azqsl::entropy::EntropyParams;
use azqsl::oracles::{self, QubitUnitaryCase};
use azqsl::qsl::{qsl_general, qsl_unitary};
use azqsl::states::{bloch_state, BlochVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (r, theta, phi) = (0.75, std::f64::consts::FRAC_PI_2, 0.0);
    let field = [0.0, 0.0, 1.0];
    let tau = 1.2;
    let h = HamiltonianModel::qubit(field)?;
    let rho0 = bloch_state(BlochVector::new(r, theta, phi)?)?;
    let traj = evolve_unitary(&h, &rho0, tau, 2001)?;
    let p = EntropyParams::new(0.5, 1.0)?;

    let closed = qsl_unitary(&h, traj.initial(), traj.final_state(), p)?.with_horizon(tau)?;
    let general = qsl_general(&traj, p)?;
    println!("tau = {tau}");
    println!("closed form: tau_qsl = {:.6}, delta = {:.4}", closed.tau_qsl, closed.delta_qsl);
    println!("trajectory:  tau_qsl = {:.6}, delta = {:.4}", general.tau_qsl, general.delta_qsl);

    let case = QubitUnitaryCase::new(r, theta, phi, field, tau)?;
    println!("relative purity (closed form) = {:.8}", oracles::unitary_purity(&case, p));
    println!("Petz speed limit (closed form) = {:.6}", oracles::unitary_tau_petz(&case, 0.5)?);
    Ok(())
}
