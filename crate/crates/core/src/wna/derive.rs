use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::ncpoly::{atom_plain, rat, NcExpr, VarIndex};
use crate::Q;

use super::expr::WnaExpr;
use super::htable::{f_d, to_f_form, HTable, Reducer};
use super::realize::phi_form;
use super::WnaError;

/// `f_{θ_{mn}} = RHS`, with the right-hand side in three spellings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaEquation {
    pub m: u32,
    pub n: u32,
    /// `½(f∘_m(f∘_n f) − f∘_n(f∘_m f))` in h-symbols.
    pub h_form: NcExpr,
    /// The same in f-derivatives; concatenation is `∘`.
    pub f_form: NcExpr,
    /// Right-hand side for `φ_{θ_{mn}}` after `f = ν − φ`.
    pub phi_form: NcExpr,
}

impl ThetaEquation {
    pub fn var(&self) -> VarIndex {
        VarIndex::Theta(self.m, self.n)
    }
}

pub fn derive_theta_equation(m: u32, n: u32, table: &mut HTable) -> Result<ThetaEquation, WnaError> {
    if m == 0 || m >= n {
        return Err(WnaError::Invalid("theta equations need 1 <= m < n".into()));
    }
    let h_form = (table.f_m_fnf(m, n)? - table.f_m_fnf(n, m)?).scale(&rat(1, 2));
    let f_form = to_f_form(&h_form, &crate::ncpoly::DerivationRules::standard())?;
    check_f_form(&f_form)?;
    let phi_form = -phi_form(&f_form);
    Ok(ThetaEquation { m, n, h_form, f_form, phi_form })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionEquation {
    pub word: Vec<u32>,
    /// `e_{(m₁…m_k)} = (…((f∘_{m₁}f)∘_{m₂}f)…)∘_{m_k}f`, unreduced.
    pub e_monomial: WnaExpr,
    /// Signed sum of right-nested products over all coarsenings of the word.
    pub expanded: WnaExpr,
    /// PDE in f-derivatives, when bare f can be eliminated within the table depth.
    pub f_form: Option<NcExpr>,
    pub phi_form: Option<NcExpr>,
    /// The monomial that blocked elimination when `f_form` is `None`.
    pub obstruction: Option<String>,
}

impl CompositionEquation {
    pub fn var(&self) -> VarIndex {
        VarIndex::Composition(self.word.clone())
    }
}

pub fn derive_composition_equation(word: &[u32], table: &mut HTable) -> Result<CompositionEquation, WnaError> {
    if word.len() < 2 || word.contains(&0) {
        return Err(WnaError::Invalid("composition words need k >= 2 positive entries".into()));
    }
    let f = WnaExpr::f();
    let mut e_monomial = f.clone();
    for &m in word {
        e_monomial = WnaExpr::prod(m, &e_monomial, &f);
    }
    let mut expanded = WnaExpr::zero();
    for parts in coarsenings(word) {
        let sign = if (word.len() - parts.len()) % 2 == 0 { Q::one() } else { -Q::one() };
        expanded.add_scaled(&sign, &right_nested(&parts));
    }
    let (f_form, obstruction) = match composition_pde(word, table) {
        Ok(e) => {
            check_f_form(&e)?;
            (Some(e), None)
        }
        Err(WnaError::Irreducible { monomial, reason }) => (None, Some(alloc::format!("{} ({})", monomial, reason))),
        Err(e) => return Err(e),
    };
    let phi = f_form.as_ref().map(|e| -phi_form(e));
    Ok(CompositionEquation { word: word.to_vec(), e_monomial, expanded, f_form, phi_form: phi, obstruction })
}

fn composition_pde(word: &[u32], table: &mut HTable) -> Result<NcExpr, WnaError> {
    let mut out = NcExpr::zero();
    for parts in coarsenings(word) {
        let sign = if (word.len() - parts.len()) % 2 == 0 { Q::one() } else { -Q::one() };
        out.add_scaled(&sign, &reduce_right_nested(&parts, table)?);
    }
    Ok(out)
}

/// The innermost double product comes from the table (so two-letter words agree exactly with
/// the θ route); outer factors use the left lemma.
fn reduce_right_nested(parts: &[u32], table: &mut HTable) -> Result<NcExpr, WnaError> {
    let j = parts.len();
    if j == 1 {
        return Ok(f_d(&[VarIndex::t(parts[0])]));
    }
    let inner = table.f_m_fnf(parts[j - 2], parts[j - 1])?;
    let mut acc = to_f_form(&inner, &crate::ncpoly::DerivationRules::standard())?;
    let mut red = Reducer::new(table);
    for &c in parts[..j - 2].iter().rev() {
        acc = red.f_circ(c, &acc)?;
    }
    Ok(acc)
}

/// `f∘_{c₁}(f∘_{c₂}(…(f∘_{c_j}f)))`
fn right_nested(parts: &[u32]) -> WnaExpr {
    let f = WnaExpr::f();
    let mut acc = f.clone();
    for &c in parts.iter().rev() {
        acc = WnaExpr::prod(c, &f, &acc);
    }
    acc
}

/// All ways of merging consecutive entries by addition.
fn coarsenings(word: &[u32]) -> Vec<Vec<u32>> {
    let cuts = word.len() - 1;
    let mut out = Vec::new();
    for mask in 0u32..(1 << cuts) {
        let mut parts = alloc::vec![word[0]];
        for (i, &w) in word[1..].iter().enumerate() {
            if mask & (1 << i) != 0 {
                *parts.last_mut().expect("non-empty") += w;
            } else {
                parts.push(w);
            }
        }
        out.push(parts);
    }
    out
}

/// Final outputs may only contain f-derivatives; anything else (a bare `f`, an unexpanded
/// h-symbol) means a higher product of nucleus elements was left behind.
fn check_f_form(e: &NcExpr) -> Result<(), WnaError> {
    for a in e.atoms() {
        if a.symbol.base != "f" || a.derivs().is_empty() {
            return Err(WnaError::Irreducible { monomial: atom_plain(&a), reason: "not an f-derivative".into() });
        }
    }
    Ok(())
}

/// `f_D` for an f-form left-hand side.
pub fn f_lhs(v: VarIndex) -> NcExpr {
    f_d(&[v])
}
