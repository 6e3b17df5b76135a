//! Semigroup-homomorphic signatures over q-ary lattices.
//!
//! The message space is the free semigroup of symbol sequences under
//! concatenation; signatures are sequences of short integer vectors that
//! concatenate alongside their messages. Signing samples discrete-Gaussian
//! preimages of per-symbol syndromes using a trapdoor basis of the q-ary
//! kernel lattice; verification checks a norm bound and the syndrome
//! congruence column by column.
//!
//! The crate is organized as:
//!
//! - [`params`]: parameter derivation and the binary parameter record
//! - [`linalg`]: exact mod-q linear algebra, integer matrices, Gram-Schmidt
//! - [`sampler`]: discrete Gaussians over Z, Z^n, and lattice cosets
//! - [`trapdoor`]: trapdoor generation, tag matrices, basis delegation
//! - [`encode`]: the semigroup algebra on messages/signatures, hashing,
//!   syndromes, spans
//! - [`sh`]: the plain scheme (keygen / sign / verify / concatenation)
//! - [`lsh`]: the tagged linear scheme (setup / sign / combine / verify)
//! - [`harness`]: simulated keygen and signing, SIS extraction, the
//!   unforgeability game runner, and the privacy experiment
//! - [`stats`]: chi-square and distance helpers used by the harness
//!
//! Everything is deterministic given the caller-supplied random stream;
//! there is no global RNG. The crate is `no_std` (with `alloc`); IO, file
//! formats, and the command-line front end live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod encode;
pub mod error;
pub mod harness;
mod kernel;
pub mod linalg;
pub mod lsh;
pub mod params;
pub mod sampler;
pub mod sh;
pub mod stats;
pub mod trapdoor;

pub use error::Error;
pub use params::{Params, Strictness};

/// Monotonic time source for the harness timing reports.
///
/// The core crate never reads a real clock; callers that want wall-clock
/// measurements supply one (the CLI does). [`NoopClock`] reports zeros.
pub trait Clock {
    fn nanos(&mut self) -> u64;
}

/// Clock that always reads zero; timing fields become zeros.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoopClock;

impl Clock for NoopClock {
    fn nanos(&mut self) -> u64 {
        0
    }
}
