//! α-z Rényi relative entropies and the entropic quantum speed limits built on them.
//!
//! States are [`states::DensityMatrix`] values. Dynamics come from a Hamiltonian or a
//! time-dependent Kraus family ([`dynamics`]) and are sampled into a
//! [`dynamics::Trajectory`]. [`qsl`] integrates the entropic upper bounds along a
//! trajectory and turns them into speed-limit times. [`oracles`] holds the scalar
//! closed forms for the qubit and two-qubit examples, used for cross-checks.
//!
//! ```
//! use azqsl::dynamics::{depolarizing_family, evolve_kraus, DepolarizingParams};
//! use azqsl::entropy::EntropyParams;
//! use azqsl::qsl::qsl_nonunitary_on;
//! use azqsl::states::{bloch_state, BlochVector};
//!
//! let rho0 = bloch_state(BlochVector::new(0.75, 0.5, 0.0).unwrap()).unwrap();
//! let family = depolarizing_family(DepolarizingParams::new(1.0).unwrap());
//! let traj = evolve_kraus(&family, &rho0, 2.0, 1001).unwrap();
//! let q = qsl_nonunitary_on(&traj, EntropyParams::new(0.3, 1.0).unwrap()).unwrap();
//! assert!(q.tau_qsl <= 2.0);
//! ```

pub mod linalg;
pub mod sample;
pub mod states;
pub mod dynamics;
pub mod entropy;
pub mod qsl;
pub mod oracles;
pub mod cli;
