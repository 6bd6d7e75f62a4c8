//! Exact truncated power series in hierarchy variables, star products, the closed-form
//! solutions of the Riccati system and residual checks of the hierarchy equations.

mod hat;
mod matrix;
mod residual;
mod ring;
mod solution;
mod star;
mod symmetric;
mod tau;

use alloc::string::String;
use core::fmt;

pub use hat::{hat_operator, t_ones_ring, weight};
pub use matrix::MatrixJet;
pub use residual::{
    apply_op, eval_on_jets, residual_deformation, residual_disguise, residual_pkp, residual_riccati, residual_sato,
    residual_sato_k, schur_neg, ResidualReport, SatoTable,
};
pub use ring::{Jet, JetRing, Mono};
pub use solution::{exp_xi, linear_solution, phi_from_linear, phi_solution, phi_solution_with, Constants, Family, SolutionSpec};
pub use star::{star_inv, star_mul, star_mul_matrix, Star, StarSpec, ThetaParam};
pub use symmetric::{
    composed_ring, elementary, elementary_from_power_sums, exp_xi_scalar, nambu_derivative_pair, nambu_triple,
    power_sum, quasi_symmetric, schur_values, xi_product_check,
};
pub use tau::{sandwich_reduce, tau_and_reduce};

use crate::ncpoly::VarIndex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JetError {
    RingMismatch,
    UnknownVar(VarIndex),
    /// A constant term (or data matrix) that must be invertible is not.
    Singular,
    Shape(String),
    Invalid(String),
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::RingMismatch => f.write_str("jets belong to different rings"),
            JetError::UnknownVar(v) => write!(f, "{} is not a variable of the ring", v),
            JetError::Singular => f.write_str("singular constant term"),
            JetError::Shape(s) => write!(f, "shape mismatch: {}", s),
            JetError::Invalid(s) => f.write_str(s),
        }
    }
}
