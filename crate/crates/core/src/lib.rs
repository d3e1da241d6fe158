//! Density-operator dynamics and two-time correlation functions for quantum
//! systems driven by non-Hermitian Hamiltonians `H = H₊ − iΓ`.
//!
//! The numerical modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances in this
//! crate are tuned for.

pub mod correlators;
pub mod error;
pub mod evolution;
pub mod matrix;
pub mod scalar;
pub mod tls;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = matrix::ComplexMatrix<f64>;
pub type State = evolution::StateMatrix<f64>;
pub type Hamiltonian = evolution::HamiltonianSplit<f64>;
pub type Propagation = evolution::PropagationConfig<f64>;
pub type Scenario = tls::TlsScenario<f64>;
pub type Oracle = tls::OracleSample<f64>;
