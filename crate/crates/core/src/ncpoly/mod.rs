//! Canonical noncommutative polynomials over exact rationals, generalized Leibniz rules,
//! fixpoint rewriting and the expression DSL.

mod derive;
mod expr;
mod parse;
mod render;
mod rewrite;

use alloc::string::String;
use core::fmt;

pub use derive::{apply_derivative, apply_derivatives, DerivationRule, DerivationRules, Splitting};
pub use expr::{rat, Atom, NcExpr, Symbol, Term, VarIndex, Word, CONSTANT_BASES};
pub use parse::{parse, parse_var, parse_with, ParseOptions, SymbolTable};
pub use render::{atom_latex, atom_plain, render, render_latex, render_plain, Format};
pub use rewrite::{
    rewrite_fixpoint, rewrite_fixpoint_traced, Pattern, Replacement, RewriteOutcome, RewriteRule, DEFAULT_MAX_ITER,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NcError {
    /// No derivation rule configured for this variable class.
    MissingRule(VarIndex),
    NonTermination { residual: NcExpr, firings: usize },
    Syntax { pos: usize, msg: String },
    UnknownSymbol { name: String, pos: usize },
    InvalidVar(String),
}

impl fmt::Display for NcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NcError::MissingRule(v) => write!(f, "no derivation rule configured for {}", v),
            NcError::NonTermination { residual, firings } => {
                write!(f, "rewriting did not terminate after {} firings; residual: {}", firings, residual)
            }
            NcError::Syntax { pos, msg } => write!(f, "syntax error at position {}: {}", pos, msg),
            NcError::UnknownSymbol { name, pos } => write!(f, "unknown symbol '{}' at position {}", name, pos),
            NcError::InvalidVar(s) => write!(f, "invalid variable {}", s),
        }
    }
}
