//! Exact invariants of polarized surfaces `(S, H)` of negative Kodaira
//! dimension, and the case tree that sorts them by the behaviour of their
//! adjoint systems `|mK + H|`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the companion `adjsurf-cli` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod adjoint;
pub mod classify;
pub mod cohomology;
pub mod cones;
pub mod connectedness;
mod error;
pub mod lattice;

pub use error::{Error, Mismatch, Result};
