//! Verification and simulation of absolutely maximally entangled and
//! k-uniform continuous-variable states.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature; `std` only adds wall-clock timing to reports.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod dense;
pub mod error;
pub mod families;
pub mod gaussian;
pub mod matrix;
pub mod scalar;
pub mod stabilizer;
pub mod subsets;
pub mod uniformity;

pub use error::{Error, Result};
pub use families::{AdjacencyMatrix, GeneratorMatrix};
pub use matrix::{Backend, Matrix, SymplecticForm};
pub use scalar::Scalar;
