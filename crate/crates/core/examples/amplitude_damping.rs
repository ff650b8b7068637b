//! Two qubits in a shared damped cavity, weak and strong coupling.

use azqsl::dynamics::{amplitude_damping_family, evolve_kraus, AmplitudeDampingParams};
use azqsl::entropy::EntropyParams;
use azqsl::qsl::qsl_nonunitary_on;
use azqsl::states::{ghz_mixed, GhzMixedParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho0 = ghz_mixed(GhzMixedParams::new(0.25)?)?;
    let p = EntropyParams::new(0.5, 1.0)?;
    for s in [0.5, 10.0] {
        let params = AmplitudeDampingParams::new(1.0, s)?;
        let family = amplitude_damping_family(params);
        println!("s = {s} ({:?})", params.regime());
        for lambda_tau in [1.0, 3.0, 6.0] {
            let traj = evolve_kraus(&family, &rho0, lambda_tau, 2001)?;
            let q = qsl_nonunitary_on(&traj, p)?;
            println!(
                "  lambda_tau = {lambda_tau}: gamma = {:+.4}, tau_qsl = {:.5}, delta = {:.4}, warnings = {:?}",
                params.gamma(lambda_tau),
                q.tau_qsl,
                q.delta_qsl,
                q.warnings
            );
        }
    }
    Ok(())
}
