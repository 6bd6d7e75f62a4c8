use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::linalg::solve_sparse;
use crate::ncpoly::{NcExpr, Word};
use crate::Q;

/// One summand `coeff · left · g_index · right` of an ideal-membership certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealTerm {
    pub index: usize,
    pub left: Word,
    pub right: Word,
    pub coeff: Q,
}

/// Evaluate a certificate.
pub fn certificate_value(cert: &[IdealTerm], gens: &[NcExpr]) -> NcExpr {
    let mut out = NcExpr::zero();
    for t in cert {
        let e = NcExpr::word(t.left.clone()).mul(&gens[t.index]).mul(&NcExpr::word(t.right.clone()));
        out.add_scaled(&t.coeff, &e);
    }
    out
}

/// Bounded two-sided ideal membership: look for `r = Σ c · a · g_i · b` with `a` a prefix and `b` a
/// suffix of words of `r`, `|a| + |b| ≤ max_mult`. Exact linear solve over the rationals.
pub fn ideal_certificate(r: &NcExpr, gens: &[NcExpr], max_mult: usize) -> Option<Vec<IdealTerm>> {
    if r.is_zero() {
        return Some(Vec::new());
    }
    let mut prefixes: BTreeSet<Word> = BTreeSet::new();
    let mut suffixes: BTreeSet<Word> = BTreeSet::new();
    for (w, _) in r.terms() {
        let atoms = w.atoms();
        for k in 0..=atoms.len().min(max_mult) {
            prefixes.insert(Word(atoms[..k].to_vec()));
            suffixes.insert(Word(atoms[atoms.len() - k..].to_vec()));
        }
    }
    let mut labels = Vec::new();
    let mut cols: Vec<BTreeMap<Word, Q>> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        for a in &prefixes {
            for b in &suffixes {
                if a.len() + b.len() > max_mult {
                    continue;
                }
                let e = NcExpr::word(a.clone()).mul(g).mul(&NcExpr::word(b.clone()));
                cols.push(e.terms().map(|(w, c)| (w.clone(), c.clone())).collect());
                labels.push((i, a.clone(), b.clone()));
            }
        }
    }
    let target: BTreeMap<Word, Q> = r.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
    let x = solve_sparse(&cols, &target)?;
    Some(
        labels
            .into_iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|((index, left, right), coeff)| IdealTerm { index, left, right, coeff })
            .collect(),
    )
}
