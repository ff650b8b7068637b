//! The alpha-z entropy family and its named limits.

use azqsl::entropy::{renyi_az, renyi_az_symmetrized, special_case, EntropyParams, SpecialCase};
use azqsl::states::{bloch_state, BlochVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = bloch_state(BlochVector::new(0.8, 0.3, 0.0)?)?;
    let sigma = bloch_state(BlochVector::new(0.5, 1.4, 0.7)?)?;

    for (alpha, z) in [(0.3, 0.8), (0.5, 1.0), (0.7, 0.7)] {
        let p = EntropyParams::new(alpha, z)?;
        println!(
            "alpha = {alpha}, z = {z}, dpi_valid = {}: D = {:.6}, symmetrized = {:.6}",
            p.dpi_valid(),
            renyi_az(&rho, &sigma, p)?.as_f64(),
            renyi_az_symmetrized(&rho, &sigma, p)?.as_f64()
        );
    }

    for which in [
        SpecialCase::Petz(0.6),
        SpecialCase::Sandwiched(0.6),
        SpecialCase::Umegaki,
        SpecialCase::MinRelative,
        SpecialCase::MaxRelative,
        SpecialCase::Fidelity,
    ] {
        println!("{which:?}: {:.6}", special_case(&rho, &sigma, which)?.as_f64());
    }
    Ok(())
}
