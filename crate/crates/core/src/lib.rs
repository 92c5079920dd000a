//! Quantum spin-J dynamics and its coarse-grained classical limit.
//!
//! * [`spin`]: the `(2J+1)`-dimensional representation, expectations,
//!   fluctuations and the real-coordinate (symplectic) view of states.
//! * [`coherent`]: SU(2) coherent states, charts on the sphere, the
//!   equivalence classes of states sharing a `⟨Ĵ⟩` direction, and the
//!   constraint `Φ` that vanishes exactly on coherent states.
//! * [`dynamics`]: exact Schrödinger propagation, the reduced flow on the
//!   coherent-state sphere and the classical flow, over a fixed-step
//!   integrator.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod quadrature;
pub mod spin;

pub use coherent::{EquivalenceWitness, PhasePoint};
pub use dynamics::{FlowKind, IntegratorConfig, Scheme, Trajectory};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spin::{HamiltonianParams, Matrix, SpinOperators, SpinSize, StateVector, Vector};
