//! Weakly nonassociative algebra over a generator `f`: graded products, the h-table, Schur
//! operators and the constructive derivation of deformation equations without bare `f`.

mod derive;
mod expr;
mod htable;
mod realize;
mod schur;

use alloc::string::String;
use core::fmt;

pub use derive::{derive_composition_equation, derive_theta_equation, f_lhs, CompositionEquation, ThetaEquation};
pub use expr::{circ, lemma_expand, Side, Tree, WnaExpr};
pub use htable::{f_d, h_f_form, h_symbol, p_symbol, to_f_form, HTable, Reducer, DEFAULT_DEPTH};
pub use realize::{map_to_matrix_realization, phi_form};
pub use schur::{eth_operator, eth_operators, schur_operator, schur_poly, t_ones, SchurOp};

use crate::ncpoly::NcError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WnaError {
    /// A bare `f` (or an atom that cannot be moved past `f`) survives.
    Irreducible { monomial: String, reason: String },
    Invalid(String),
    Nc(NcError),
}

impl From<NcError> for WnaError {
    fn from(e: NcError) -> Self {
        WnaError::Nc(e)
    }
}

impl fmt::Display for WnaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WnaError::Irreducible { monomial, reason } => write!(f, "irreducible: {} ({})", monomial, reason),
            WnaError::Invalid(s) => f.write_str(s),
            WnaError::Nc(e) => write!(f, "{}", e),
        }
    }
}

#[cfg(test)]
mod tests;
