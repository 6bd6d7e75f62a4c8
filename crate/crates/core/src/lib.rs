#![no_std]
//! Exact computer algebra for the deformation-flow extensions of the noncommutative
//! potential KP hierarchy.

extern crate alloc;

pub mod flows;
pub mod jets;
pub mod linalg;
pub mod ncpoly;
pub mod wna;

/// Exact rational coefficients.
pub type Q = num_rational::BigRational;
