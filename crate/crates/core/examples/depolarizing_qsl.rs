//! Bounds and speed limits under single-qubit depolarizing noise.

use azqsl::dynamics::{depolarizing_family, evolve_kraus, DepolarizingParams};
use azqsl::entropy::EntropyParams;
use azqsl::oracles::{self, DepolarizingCase};
use azqsl::qsl::{integrate_bounds, qsl_nonunitary_on};
use azqsl::states::{bloch_state, BlochVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 0.75;
    let family = depolarizing_family(DepolarizingParams::new(1.0)?);
    let rho0 = bloch_state(BlochVector::new(r, 0.4, 0.0)?)?;

    println!("gamma_tau  alpha  D_sym      rhs_sym    tau_qsl    closed-form tau_fwd");
    for gamma_tau in [0.5, 2.0, 5.0] {
        let traj = evolve_kraus(&family, &rho0, gamma_tau, 4001)?;
        for alpha in [0.3, 0.5, 0.9] {
            let p = EntropyParams::new(alpha, 1.0)?;
            let b = integrate_bounds(&traj, p)?;
            let q = qsl_nonunitary_on(&traj, p)?;
            let want = oracles::depolarizing_tau(&DepolarizingCase::new(r, gamma_tau)?, p);
            println!(
                "{gamma_tau:<10} {alpha:<6} {:<10.6} {:<10.6} {:<10.6} {want:.6}",
                b.d_sym.as_f64(),
                b.rhs_sym,
                q.tau_qsl
            );
        }
    }
    Ok(())
}
