//! Exact arithmetic over a truncated perfectoid valuation ring of
//! characteristic `p`, and the linear algebra built on top of it.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of immutable values; IO, JSON and the command line live in the
//! `almostperiods` companion crate.
//!
//! Layout:
//!
//! * [`field`], [`puiseux`]: the base ring `F_q[[t^{1/p^∞}]]` truncated at a
//!   root level and a `t`-adic precision.
//! * [`eldiv`]: nonincreasing sequences of elementary divisors.
//! * [`matrix`], [`snf`], [`module`], [`tower`]: Smith normal form over the
//!   base ring, finitely presented torsion modules and the Frobenius tower
//!   verifier.
//! * [`witt`]: truncated Witt vectors, the generator `ξ` of `ker θ`, and
//!   `B_dR^+ / Fil^d`.
//! * [`zpm`], [`cyclotomic`], [`koszul`], [`findiff`]: linear algebra over
//!   `Z/p^m` and the Koszul-complex cohomology computations.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cyclotomic;
pub mod eldiv;
pub mod error;
pub mod field;
pub mod findiff;
pub mod koszul;
pub mod matrix;
pub mod module;
pub mod params;
pub mod puiseux;
pub mod rational;
pub mod rng;
pub mod snf;
pub mod tower;
pub mod witt;
pub mod zpm;

pub use error::{Error, Result};
pub use params::{BaseRing, ModelParams};
pub use puiseux::{Puiseux, Valuation};
pub use rational::Q;
