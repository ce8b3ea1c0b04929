#![no_std]
//! Exact arithmetic for Hilbert Eisenstein series over totally real fields,
//! their restriction along cyclic degree-`p` towers, and the local constants
//! and class groups that accompany them.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod classgroups;
pub mod congruence;
pub mod eisenstein;
pub mod error;
pub mod local;
pub mod locfun;
pub mod nf;
pub mod presets;
pub mod tower;

pub use error::{Error, Result};
