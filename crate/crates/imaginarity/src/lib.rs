//! Imaginarity measures of quantum states.
//!
//! A state is free when its density matrix is entrywise real in the fixed
//! basis; imaginarity quantifies the distance to that set. This crate
//! implements three measure families driven by the Tsallis relative
//! alpha-entropy, the sandwiched Renyi relative entropy and the Tsallis
//! relative operator entropy, each in several evaluation modes:
//!
//! - definitional: the kernel is maximized over all real states by a
//!   multi-start simplex search ([`optimizer`]),
//! - pure-restricted: the maximization runs over pure real states only,
//! - closed forms for qubits, including the canonical-form family in `x` and
//!   the post-bit-flip expressions,
//! - a brute-force qubit grid oracle for ground truth.
//!
//! On top of the measures sit channel-decay sweeps ([`decay`]), state-ordering
//! checks ([`ordering`]) and batch verification suites ([`verification`]).
//! The `imag` binary exposes the same functionality on the command line; the
//! `examples/` directory has one runnable program per capability.

pub mod channels;
pub mod decay;
pub mod divergences;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod optimizer;
pub mod ordering;
pub mod states;
pub mod tolerances;
pub mod verification;

pub use error::{Error, Result};
