//! Learning d-regular graph states from single-qubit Pauli measurements.
//!
//! The crate contains a stabilizer tableau simulator ([`stabsim`]), a dense
//! statevector oracle for small instances ([`densesim`]), the candidate-set
//! learner ([`learner`]), closed-form sample-complexity bounds ([`bounds`]),
//! and an experiment harness with a CLI ([`harness`], [`cli`]).

pub mod bits;
pub mod bounds;
pub mod cli;
pub mod densesim;
pub mod error;
pub mod graph;
pub mod harness;
pub mod learner;
pub mod rng;
pub mod stabsim;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
