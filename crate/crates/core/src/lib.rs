//! Construction, simulation, and certification of minimum-error one-query
//! identification of Boolean oracles.
//!
//! Layers, bottom up:
//!
//! - [`linalg`]: small dense complex matrices, Hermitian eigensolver, PSD roots.
//! - [`oracle`]: truth tables, XOR oracles, hypothesis families.
//! - [`circuit`]: gate lists, unitaries, statevector evolution.
//! - [`discrim`]: Gram matrices, square-root measurements, success
//!   probabilities, optimality certification.
//! - [`protocol`]: the closed-form optimal protocol for the four one-bit
//!   functions (success probability 3/4).
//! - [`optimize`]: independent numerical search over probe states.
//! - [`sample`]: seeded shot-level Monte Carlo of the protocol.
//! - [`report`]: the verification battery and structured reports used by
//!   the `odx` binary.

pub mod circuit;
pub mod discrim;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod sample;

pub use error::{Error, Result};
