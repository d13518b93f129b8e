//! Exact permanents, Hadamard-type permanent bounds and the random
//! transposition heat flow on the symmetric group.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! computation: IO, file formats and the command-line driver live in the
//! `hadperm-cli` companion crate.
//!
//! Module map:
//!
//! * [`matrix`]: dense complex column matrices, `p`-norms, generators.
//! * [`permanent`]: Ryser and brute-force permanents, minor gradients,
//!   sub-permanent functionals.
//! * [`bounds`]: ratio reports for every bound, equality classification,
//!   bracket for the sharp constant `C(p)`.
//! * [`symgroup`]: difference operators, Laplacian and heat semigroup on
//!   `S_N`, the column flow and the functional `eta_p(t)`.
//! * [`optimize`]: multi-start projected ascent estimating `C(p)`.
//! * [`interp`]: multilinear forms and numerical log-convexity checks.

#![no_std]
// NaN must fail the `!(x > 0.0)` style guards, and index loops over
// several parallel arrays read better than zipped iterators here.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
mod error;
pub mod interp;
pub mod math;
pub mod matrix;
pub mod optimize;
pub mod permanent;
pub mod symgroup;

pub use error::{Error, Result};
pub use matrix::{ColumnMatrix, PExponent, RandomMode, RngSeed};
pub use num_complex::Complex64;
