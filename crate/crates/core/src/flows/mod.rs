//! Hierarchy flow systems as rewrite data, conditional commutativity checks and identity
//! verification by elimination.

mod constants;
mod ideal;
mod rhs;
mod system;

use alloc::string::String;
use core::fmt;

pub use constants::{expand_constants, family_expr, family_symbol, lqrs_expand, ConstantSpec, Family};
pub use ideal::{certificate_value, ideal_certificate, IdealTerm};
pub use rhs::{composition_flow_rhs, moyal_flow_rhs, phi, phi_d, riccati_rhs, MoyalForm};
pub use system::{
    check_commute, flow_key, verify_identity, CommutatorReport, CommuteStatus, FlowKey, FlowSystem, IdentityReport,
    Reduction, DEFAULT_CONSTRAINT_DEPTH,
};

use crate::ncpoly::NcError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowError {
    Nc(NcError),
    MissingFlow(FlowKey),
    Invalid(String),
}

impl From<NcError> for FlowError {
    fn from(e: NcError) -> Self {
        FlowError::Nc(e)
    }
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::Nc(e) => write!(f, "{}", e),
            FlowError::MissingFlow((s, v)) => write!(f, "no flow for {} in {}", s, v),
            FlowError::Invalid(s) => f.write_str(s),
        }
    }
}

#[cfg(test)]
mod tests;
