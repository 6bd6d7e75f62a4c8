use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::expr::{rat, Atom, NcExpr, VarIndex, Word};
use super::NcError;
use crate::Q;

/// One summand of a split Leibniz rule: `coeff · (left a) · (right b)`.
/// An empty derivative list stands for the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub coeff: Q,
    pub left: Vec<VarIndex>,
    pub right: Vec<VarIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationRule {
    pub var: VarIndex,
    pub splittings: Vec<Splitting>,
}

impl DerivationRule {
    /// Plain Leibniz rule `{(∂,id),(id,∂)}`.
    pub fn leibniz(var: VarIndex) -> Self {
        let splittings = alloc::vec![
            Splitting { coeff: Q::one(), left: alloc::vec![var.clone()], right: Vec::new() },
            Splitting { coeff: Q::one(), left: Vec::new(), right: alloc::vec![var.clone()] },
        ];
        DerivationRule { var, splittings }
    }

    /// The rule attached to each variable class of the hierarchy.
    pub fn standard(var: &VarIndex) -> Self {
        match var {
            VarIndex::Composition(w) if w.len() == 1 => DerivationRule::leibniz(var.clone()),
            VarIndex::Composition(w) => {
                let r = w.len();
                let part = |s: &[u32]| -> Vec<VarIndex> {
                    if s.is_empty() {
                        Vec::new()
                    } else {
                        alloc::vec![VarIndex::Composition(s.to_vec())]
                    }
                };
                let splittings = (0..=r)
                    .map(|k| Splitting { coeff: Q::one(), left: part(&w[..k]), right: part(&w[k..]) })
                    .collect();
                DerivationRule { var: var.clone(), splittings }
            }
            VarIndex::Theta(m, n) => {
                let (tm, tn) = (VarIndex::t(*m), VarIndex::t(*n));
                let splittings = alloc::vec![
                    Splitting { coeff: Q::one(), left: alloc::vec![var.clone()], right: Vec::new() },
                    Splitting { coeff: Q::one(), left: Vec::new(), right: alloc::vec![var.clone()] },
                    Splitting { coeff: rat(1, 2), left: alloc::vec![tm.clone()], right: alloc::vec![tn.clone()] },
                    Splitting { coeff: rat(-1, 2), left: alloc::vec![tn], right: alloc::vec![tm] },
                ];
                DerivationRule { var: var.clone(), splittings }
            }
        }
    }
}

/// The set of configured derivation rules.
#[derive(Clone, Debug, Default)]
pub struct DerivationRules {
    table: BTreeMap<VarIndex, DerivationRule>,
    auto: bool,
}

impl DerivationRules {
    /// Every variable gets its standard rule on demand.
    pub fn standard() -> Self {
        DerivationRules { table: BTreeMap::new(), auto: true }
    }

    /// Only the listed rules; anything else is an unconfigured variable class.
    pub fn explicit<I: IntoIterator<Item = DerivationRule>>(rules: I) -> Self {
        DerivationRules { table: rules.into_iter().map(|r| (r.var.clone(), r)).collect(), auto: false }
    }

    /// Standard rules for the given variables and everything their splittings reach.
    pub fn standard_for(vars: &[VarIndex]) -> Self {
        let mut table = BTreeMap::new();
        let mut stack: Vec<VarIndex> = vars.to_vec();
        while let Some(v) = stack.pop() {
            if table.contains_key(&v) {
                continue;
            }
            let rule = DerivationRule::standard(&v);
            for s in &rule.splittings {
                stack.extend(s.left.iter().cloned());
                stack.extend(s.right.iter().cloned());
            }
            table.insert(v, rule);
        }
        DerivationRules { table, auto: false }
    }

    pub fn insert(&mut self, rule: DerivationRule) {
        self.table.insert(rule.var.clone(), rule);
    }

    pub fn get(&self, v: &VarIndex) -> Result<Cow<'_, DerivationRule>, NcError> {
        match self.table.get(v) {
            Some(r) => Ok(Cow::Borrowed(r)),
            None if self.auto => Ok(Cow::Owned(DerivationRule::standard(v))),
            None => Err(NcError::MissingRule(v.clone())),
        }
    }
}

/// Differentiate `e` with respect to `v` by iterating the binary splitting of its rule across every word.
pub fn apply_derivative(v: &VarIndex, e: &NcExpr, rules: &DerivationRules) -> Result<NcExpr, NcError> {
    let mut out = NcExpr::zero();
    for (w, c) in e.terms() {
        let d = derive_atoms(v, w.atoms(), rules)?;
        out.add_scaled(c, &d);
    }
    Ok(out)
}

/// Apply several derivatives in sequence.
pub fn apply_derivatives(vars: &[VarIndex], e: &NcExpr, rules: &DerivationRules) -> Result<NcExpr, NcError> {
    let mut cur = e.clone();
    for v in vars {
        if cur.is_zero() {
            break;
        }
        cur = apply_derivative(v, &cur, rules)?;
    }
    Ok(cur)
}

fn derive_atoms(v: &VarIndex, atoms: &[Atom], rules: &DerivationRules) -> Result<NcExpr, NcError> {
    let rule = rules.get(v)?;
    let Some((first, rest)) = atoms.split_first() else {
        return Ok(NcExpr::zero());
    };
    let mut out = NcExpr::zero();
    let rest_expr = NcExpr::word(Word(rest.to_vec()));
    for s in &rule.splittings {
        if s.coeff.is_zero() || (rest.is_empty() && !s.right.is_empty()) {
            continue;
        }
        let mut left = Some(first.clone());
        for d in &s.left {
            left = left.and_then(|a| a.differentiated(d));
        }
        let Some(left) = left else { continue };
        let right = if s.right.is_empty() {
            rest_expr.clone()
        } else {
            let mut cur = NcExpr::zero();
            let mut first_step = true;
            for d in &s.right {
                cur = if first_step {
                    first_step = false;
                    derive_atoms(d, rest, rules)?
                } else {
                    apply_derivative(d, &cur, rules)?
                };
            }
            cur
        };
        let prod = NcExpr::atom(left).mul(&right);
        out.add_scaled(&s.coeff, &prod);
    }
    Ok(out)
}
