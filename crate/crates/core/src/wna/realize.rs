use num_traits::{One, Zero};

use crate::flows::{family_expr, phi, Family};
use crate::ncpoly::{Atom, NcExpr, Symbol};
use crate::Q;

use super::expr::{Tree, WnaExpr};

/// Image of a nucleus element in the matrix algebra: `f_D ↦ −φ_D`, and each `∘` between
/// factors becomes `∗Q`. Other atoms are kept as matrices of their own.
pub fn phi_form(e: &NcExpr) -> NcExpr {
    let q = family_expr(Family::Q, 1);
    let mut out = NcExpr::zero();
    for (w, c) in e.terms() {
        let mut acc = NcExpr::scalar(c.clone());
        for (i, a) in w.atoms().iter().enumerate() {
            if i > 0 {
                acc = acc.mul(&q);
            }
            acc = acc.mul(&atom_image(a));
        }
        out = out + acc;
    }
    out
}

fn atom_image(a: &Atom) -> NcExpr {
    if a.symbol == Symbol::new("f") && !a.derivs().is_empty() {
        let d = Atom::with_derivs(Symbol::new("phi"), a.derivs().to_vec()).expect("phi is dynamic");
        return -NcExpr::atom(d);
    }
    NcExpr::atom(a.clone())
}

/// Realize with `f = ν − φ` and `ν∘_nν = −S_n`, `ν∘_nA = L_nA`, `A∘_nν = −AR_n`,
/// `A∘_nB = AQ_nB`. A leftover multiple of `ν` appears as the atom `nu`.
pub fn map_to_matrix_realization(e: &WnaExpr) -> NcExpr {
    let mut out = NcExpr::zero();
    for (t, c) in e.terms() {
        let (nu, a) = realize(t);
        let mut part = a;
        if !nu.is_zero() {
            part = part + NcExpr::sym("nu").scale(&nu);
        }
        out.add_scaled(c, &part);
    }
    out
}

/// `(c, A)` standing for `cν + A`.
fn realize(t: &Tree) -> (Q, NcExpr) {
    match t {
        Tree::F => (Q::one(), -phi()),
        Tree::N(w) => (Q::zero(), phi_form(&NcExpr::word(w.clone()))),
        Tree::Prod(n, x, y) => {
            let (a, xa) = realize(x);
            let (b, yb) = realize(y);
            let mut out = xa.mul(&family_expr(Family::Q, *n)).mul(&yb);
            if !(&a * &b).is_zero() {
                out.add_scaled(&-(&a * &b), &family_expr(Family::S, *n));
            }
            if !a.is_zero() {
                out.add_scaled(&a, &family_expr(Family::L, *n).mul(&yb));
            }
            if !b.is_zero() {
                out.add_scaled(&-b, &xa.mul(&family_expr(Family::R, *n)));
            }
            (Q::zero(), out)
        }
    }
}
