//! Simulator and design toolkit for bosonic-junction dynamics in engineered
//! waveguide lattices.
//!
//! The two-site Bose-Hubbard problem for `N` bosons maps onto an `(N+1)`-site
//! tight-binding chain in Fock space with couplings `kappa_l = J*sqrt((l+1)(N-l))`
//! and detunings `V_l = (U/2)(l^2 + (N-l)^2 - N)`. This crate
//!
//! * evolves Fock-state amplitudes exactly under that chain ([`fock`]),
//! * provides the closed-form two-boson solution as an oracle ([`two_boson`]),
//! * inverse-designs a physical waveguide array (spacings and index
//!   contrasts) that realizes the chain ([`optics`]),
//! * and validates the design by full paraxial wave propagation ([`bpm`]).
//!
//! Quantum time is identified with propagation distance `z`; all rates are
//! per millimetre, transverse geometry is in micrometres.

pub mod analysis;
pub mod bpm;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod optics;
pub mod two_boson;

pub use error::{Error, Result};

/// Micrometres per millimetre; converts the optics-layer rates (1/um) to the
/// tight-binding convention (1/mm).
pub const UM_PER_MM: f64 = 1.0e3;
