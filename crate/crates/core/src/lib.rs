//! Measurement-driven (dynamic quantum Zeno) evolution of a spin-1/2, the
//! geometric phases it produces, and polarization transport through a
//! regular polygon of ideal mirrors.
//!
//! * [`su2`]: spinors, 2×2 operators, `exp(-iθσ·n)`, projections, Bloch vectors
//! * [`zeno`]: projection chains with and without a Hamiltonian, closed
//!   forms, solid angles and Pancharatnam phases
//! * [`photon`]: SO(3) rotations, mirror operators and polygon transport
//! * [`batch`]: order-preserving batch evaluation (rayon behind `parallel`)
//! * [`convergence`]: log-log order fits

pub mod batch;
pub mod convergence;
pub mod error;
pub mod phase;
pub mod photon;
pub mod su2;
pub mod zeno;

pub use error::{Error, Result};
pub use su2::{Complex, Mat2, Spinor, UnitVec3};
