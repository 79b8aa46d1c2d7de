//! Two-frequency-mode optical channel model of a double-Λ EIT four-wave-mixing
//! medium.
//!
//! The medium maps the probe and signal frequency modes through a 2×2 complex
//! transfer matrix and acts on photon-number states as a trace-preserving
//! channel. The crate is split into three layers:
//!
//! - [`medium`]: the linear response of the atomic medium — transfer matrix,
//!   propagation and Langevin-noise coefficients, diffusion matrices, and the
//!   commutator/loss bookkeeping identity.
//! - [`fock`]: truncated two-mode Fock-state machinery — density matrices,
//!   the reduced-density-operator channel, a unitary-dilation oracle, and
//!   fidelity/probability extraction.
//! - [`gates`]: physics results built on top — coherent phase response,
//!   Hadamard gates on two-color qubits, frequency-domain Hong–Ou–Mandel
//!   interference, NOON-state generation, and two-qubit SWAP gate metrics.

pub mod error;
pub mod fock;
pub mod gates;
pub mod medium;
pub mod quad;

pub use error::{Error, Result};
