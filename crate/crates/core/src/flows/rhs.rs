use crate::ncpoly::{rat, Atom, NcExpr, Symbol, VarIndex};

use super::constants::{family_expr, Family};

pub fn phi() -> NcExpr {
    NcExpr::sym("phi")
}

/// `φ` differentiated once by `v`.
pub fn phi_d(v: VarIndex) -> NcExpr {
    NcExpr::atom(Atom::with_derivs(Symbol::new("phi"), alloc::vec![v]).expect("phi is dynamic"))
}

/// `S_n + L_n φ − φ R_n − φ Q_n φ` with the families left symbolic.
pub fn riccati_rhs(n: u32) -> NcExpr {
    let p = phi();
    let mut e = family_expr(Family::S, n);
    e = e + family_expr(Family::L, n).mul(&p);
    e = e - p.mul(&family_expr(Family::R, n));
    e - p.mul(&family_expr(Family::Q, n)).mul(&p)
}

/// `R_n + Q_n φ`
fn r_plus_q_phi(n: u32) -> NcExpr {
    &family_expr(Family::R, n) + &family_expr(Family::Q, n).mul(&phi())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoyalForm {
    /// `½(φ_{t_n}(R_m + Q_m φ) − φ_{t_m}(R_n + Q_n φ))`
    Derivative,
    /// The same with `φ_{t_m}`, `φ_{t_n}` replaced by their Riccati right-hand sides.
    Ode,
}

/// Right-hand side of the `θ_{mn}` deformation flow (antisymmetric in m, n).
pub fn moyal_flow_rhs(m: u32, n: u32, form: MoyalForm) -> NcExpr {
    let (dm, dn) = match form {
        MoyalForm::Derivative => (phi_d(VarIndex::t(m)), phi_d(VarIndex::t(n))),
        MoyalForm::Ode => (riccati_rhs(m), riccati_rhs(n)),
    };
    (dn.mul(&r_plus_q_phi(m)) - dm.mul(&r_plus_q_phi(n))).scale(&rat(1, 2))
}

/// `−φ_{t_{m1...m(k−1)}} (R_{mk} + Q_{mk} φ)`; with `unfold` the prefix derivative is itself
/// replaced recursively, ending in the Riccati right-hand side.
pub fn composition_flow_rhs(word: &[u32], unfold: bool) -> NcExpr {
    assert!(word.len() >= 2, "composition flows need k >= 2");
    let (prefix, last) = word.split_at(word.len() - 1);
    let head = if unfold {
        if prefix.len() == 1 {
            riccati_rhs(prefix[0])
        } else {
            composition_flow_rhs(prefix, true)
        }
    } else {
        phi_d(VarIndex::Composition(prefix.to_vec()))
    };
    -head.mul(&r_plus_q_phi(last[0]))
}
