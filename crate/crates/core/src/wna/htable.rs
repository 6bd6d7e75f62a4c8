use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::ncpoly::{apply_derivative, apply_derivatives, Atom, DerivationRules, NcExpr, Symbol, VarIndex, Word};
use crate::Q;

use super::expr::{Tree, WnaExpr};
use super::schur::schur_operator;
use super::WnaError;

/// Largest `n + m` for which `h^{(n)}_m` is computed unless configured otherwise.
pub const DEFAULT_DEPTH: u32 = 8;

/// `h_k` as an h-form atom (`h_1` is written `p_1`).
pub fn h_symbol(k: u32) -> NcExpr {
    if k == 1 {
        return p_symbol(1);
    }
    NcExpr::atom(Atom::new(Symbol::indexed("h", k)))
}

/// `p_n = f∘_n f` as an h-form atom.
pub fn p_symbol(n: u32) -> NcExpr {
    NcExpr::atom(Atom::new(Symbol::indexed("p", n)))
}

/// `f` differentiated by the given variables.
pub fn f_d(vars: &[VarIndex]) -> NcExpr {
    NcExpr::atom(Atom::with_derivs(Symbol::new("f"), vars.to_vec()).expect("f is dynamic"))
}

/// Memo of `h^{(n)}_m = L_f^m p_n` in h-form, filled by the `r = 1` recursion
/// `h^{(n)}_m = h^{(n−1)}_{m+1} + h_{m+n} − ∂_{t₁}h^{(n−1)}_m + Σ_{k=1}^m h_k∘h^{(n−1)}_{m−k}
///  − Σ_{k=1}^{n−2} h^{(n−1−k)}_m∘h_k`.
#[derive(Clone, Debug)]
pub struct HTable {
    pub depth: u32,
    memo: BTreeMap<(u32, u32), NcExpr>,
    rules: DerivationRules,
}

impl Default for HTable {
    fn default() -> Self {
        HTable::new(DEFAULT_DEPTH)
    }
}

impl HTable {
    pub fn new(depth: u32) -> Self {
        HTable { depth, memo: BTreeMap::new(), rules: DerivationRules::standard() }
    }

    /// `h^{(n)}_m` in h-symbols and their t-derivatives.
    pub fn get(&mut self, n: u32, m: u32) -> Result<NcExpr, WnaError> {
        if n == 0 {
            return Err(WnaError::Invalid("h^(n)_m needs n >= 1".into()));
        }
        if n + m > self.depth {
            return Err(WnaError::Irreducible {
                monomial: format!("h^({})_{}", n, m),
                reason: format!("beyond h-table depth {}", self.depth),
            });
        }
        if let Some(e) = self.memo.get(&(n, m)) {
            return Ok(e.clone());
        }
        let e = if m == 0 {
            p_symbol(n)
        } else if n == 1 {
            h_symbol(m + 1)
        } else {
            let r = n - 1;
            let mut e = self.get(r, m + 1)? + h_symbol(m + n);
            e = e - apply_derivative(&VarIndex::t(1), &self.get(r, m)?, &self.rules)?;
            for k in 1..=m {
                e = e + h_symbol(k).mul(&self.get(r, m - k)?);
            }
            for k in 1..r {
                e = e - self.get(r - k, m)?.mul(&h_symbol(k));
            }
            e
        };
        self.memo.insert((n, m), e.clone());
        Ok(e)
    }

    /// `h^{(n)}_m` in f-derivatives.
    pub fn get_f(&mut self, n: u32, m: u32) -> Result<NcExpr, WnaError> {
        let e = self.get(n, m)?;
        to_f_form(&e, &self.rules)
    }

    /// Entries computed so far.
    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &NcExpr)> {
        self.memo.iter()
    }

    /// `f∘_m(f∘_n f) = h^{(n)}_m − Σ_{k=1}^{m−1} p_{m−k}∘h^{(n)}_{k−1}` in h-form.
    pub fn f_m_fnf(&mut self, m: u32, n: u32) -> Result<NcExpr, WnaError> {
        let mut e = self.get(n, m)?;
        for k in 1..m {
            e = e - p_symbol(m - k).mul(&self.get(n, k - 1)?);
        }
        Ok(e)
    }
}

/// Replace `p_n` by `f_{t_n}` and `h_k` by `p_k(∂̃)f`, keeping any derivatives on them.
pub fn to_f_form(e: &NcExpr, rules: &DerivationRules) -> Result<NcExpr, WnaError> {
    let mut err = None;
    let out = e.substitute(|a| {
        let sym = &a.symbol;
        let base = match (sym.base.as_str(), sym.index) {
            ("p", Some(n)) => f_d(&[VarIndex::t(n)]),
            ("h", Some(k)) => match schur_operator(k).apply(&f_d(&[]), rules) {
                Ok(x) => x,
                Err(e) => {
                    err = Some(e);
                    return None;
                }
            },
            _ => return None,
        };
        match apply_derivatives(a.derivs(), &base, rules) {
            Ok(x) => Some(x),
            Err(e) => {
                err = Some(e);
                None
            }
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// An element `c·f + A` with `A` in the nucleus, written in f-derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Elem {
    f: Q,
    nuc: NcExpr,
}

/// Evaluates WNA expressions to f-form nucleus elements under the flows `f_{t_n} = f∘_n f`.
pub struct Reducer<'a> {
    table: &'a mut HTable,
    rules: DerivationRules,
    left_memo: BTreeMap<Atom, NcExpr>,
    right_memo: BTreeMap<Atom, NcExpr>,
}

impl<'a> Reducer<'a> {
    pub fn new(table: &'a mut HTable) -> Self {
        Reducer { table, rules: DerivationRules::standard(), left_memo: BTreeMap::new(), right_memo: BTreeMap::new() }
    }

    /// Reduce to an f-form expression. Fails if a bare `f` survives or an atom cannot be moved
    /// past `f` with the available table.
    pub fn reduce(&mut self, e: &WnaExpr) -> Result<NcExpr, WnaError> {
        let mut out = NcExpr::zero();
        let mut bare = Q::zero();
        for (t, c) in e.terms() {
            let v = self.eval(t).map_err(|err| match err {
                WnaError::Irreducible { monomial, reason } => {
                    WnaError::Irreducible { monomial: format!("{} in {}", monomial, t), reason }
                }
                other => other,
            })?;
            bare += c * &v.f;
            out.add_scaled(c, &v.nuc);
        }
        if !bare.is_zero() {
            return Err(WnaError::Irreducible { monomial: "f".into(), reason: "bare f remains".into() });
        }
        Ok(out)
    }

    /// `L_f a = f∘a` for a nucleus element.
    pub fn left(&mut self, a: &NcExpr) -> Result<NcExpr, WnaError> {
        let mut out = NcExpr::zero();
        for (w, c) in a.terms() {
            let (first, rest) = split_first(w)?;
            out.add_scaled(c, &self.left_atom(first)?.mul(&NcExpr::word(rest)));
        }
        Ok(out)
    }

    /// `R_f a = a∘f` for a nucleus element.
    pub fn right(&mut self, a: &NcExpr) -> Result<NcExpr, WnaError> {
        let mut out = NcExpr::zero();
        for (w, c) in a.terms() {
            let (init, last) = split_last(w)?;
            out.add_scaled(c, &NcExpr::word(init).mul(&self.right_atom(last)?));
        }
        Ok(out)
    }

    /// `f∘_n a = L_fⁿa − Σ_{k=1}^{n−1} p_{n−k}∘L_f^{k−1}a`.
    pub fn f_circ(&mut self, n: u32, a: &NcExpr) -> Result<NcExpr, WnaError> {
        let mut powers = alloc::vec![a.clone()];
        for _ in 0..n {
            let next = self.left(powers.last().expect("non-empty"))?;
            powers.push(next);
        }
        let mut out = powers[n as usize].clone();
        for k in 1..n {
            out = out - f_d(&[VarIndex::t(n - k)]).mul(&powers[(k - 1) as usize]);
        }
        Ok(out)
    }

    /// `a∘_n f = (−1)^{n+1}R_fⁿa − Σ_{k=1}^{n−1}(−1)^k (R_f^{k−1}a)∘p_{n−k}`.
    pub fn circ_f(&mut self, n: u32, a: &NcExpr) -> Result<NcExpr, WnaError> {
        let mut powers = alloc::vec![a.clone()];
        for _ in 0..n {
            let next = self.right(powers.last().expect("non-empty"))?;
            powers.push(next);
        }
        let mut out = powers[n as usize].scale(&sign(n + 1));
        for k in 1..n {
            out = out - powers[(k - 1) as usize].mul(&f_d(&[VarIndex::t(n - k)])).scale(&sign(k));
        }
        Ok(out)
    }

    /// `a∘_n b` for nucleus elements, by `a∘_n b = a∘_{n−1}(f∘b) − (a∘_{n−1}f)∘b`.
    fn nuc_circ(&mut self, n: u32, a: &NcExpr, b: &NcExpr) -> Result<NcExpr, WnaError> {
        if n == 1 {
            return Ok(a.mul(b));
        }
        let fb = self.left(b)?;
        let first = self.nuc_circ(n - 1, a, &fb)?;
        let af = self.circ_f(n - 1, a)?;
        Ok(first - af.mul(b))
    }

    fn eval(&mut self, t: &Tree) -> Result<Elem, WnaError> {
        match t {
            Tree::F => Ok(Elem { f: Q::one(), nuc: NcExpr::zero() }),
            Tree::N(w) => Ok(Elem { f: Q::zero(), nuc: NcExpr::word(w.clone()) }),
            Tree::Prod(n, a, b) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                let mut nuc = NcExpr::zero();
                let ff = &x.f * &y.f;
                if !ff.is_zero() {
                    nuc.add_scaled(&ff, &f_d(&[VarIndex::t(*n)]));
                }
                if !x.f.is_zero() && !y.nuc.is_zero() {
                    nuc.add_scaled(&x.f, &self.f_circ(*n, &y.nuc)?);
                }
                if !y.f.is_zero() && !x.nuc.is_zero() {
                    nuc.add_scaled(&y.f, &self.circ_f(*n, &x.nuc)?);
                }
                if !x.nuc.is_zero() && !y.nuc.is_zero() {
                    nuc = nuc + self.nuc_circ(*n, &x.nuc, &y.nuc)?;
                }
                Ok(Elem { f: Q::zero(), nuc })
            }
        }
    }

    /// `f∘f_D`: the table gives `f∘f_{t_n} = h^{(n)}_1`; further derivatives move out by
    /// `f∘g_v = ∂_v(f∘g) − f_v∘g`.
    fn left_atom(&mut self, a: &Atom) -> Result<NcExpr, WnaError> {
        if let Some(e) = self.left_memo.get(a) {
            return Ok(e.clone());
        }
        let (v, rest) = peel(a)?;
        let e = if rest.is_empty() {
            let n = single_t(&v).expect("peel checks");
            self.table.get_f(n, 1)?
        } else {
            let inner = self.left_atom(&f_atom(&rest))?;
            apply_derivative(&v, &inner, &self.rules)? - f_d(&[v]).mul(&f_d(&rest))
        };
        self.left_memo.insert(a.clone(), e.clone());
        Ok(e)
    }

    /// `f_D∘f`: `f_{t_n}∘f = f∘_n p₁ − p_{n+1}`, and `g_v∘f = ∂_v(g∘f) − g∘f_v`.
    fn right_atom(&mut self, a: &Atom) -> Result<NcExpr, WnaError> {
        if let Some(e) = self.right_memo.get(a) {
            return Ok(e.clone());
        }
        let (v, rest) = peel(a)?;
        let e = if rest.is_empty() {
            let n = single_t(&v).expect("peel checks");
            let mut e = self.table.get_f(1, n)?;
            for k in 1..n {
                e = e - f_d(&[VarIndex::t(n - k)]).mul(&self.table.get_f(1, k - 1)?);
            }
            e - f_d(&[VarIndex::t(n + 1)])
        } else {
            let inner = self.right_atom(&f_atom(&rest))?;
            apply_derivative(&v, &inner, &self.rules)? - f_d(&rest).mul(&f_d(&[v]))
        };
        self.right_memo.insert(a.clone(), e.clone());
        Ok(e)
    }
}

fn f_atom(vars: &[VarIndex]) -> Atom {
    Atom::with_derivs(Symbol::new("f"), vars.to_vec()).expect("f is dynamic")
}

fn single_t(v: &VarIndex) -> Option<u32> {
    match v {
        VarIndex::Composition(w) if w.len() == 1 => Some(w[0]),
        _ => None,
    }
}

/// Split an f-derivative atom into its last ordinary variable and the rest.
fn peel(a: &Atom) -> Result<(VarIndex, Vec<VarIndex>), WnaError> {
    let irreducible = |why: &str| WnaError::Irreducible { monomial: crate::ncpoly::atom_plain(a), reason: why.into() };
    if a.symbol != Symbol::new("f") || a.derivs().is_empty() {
        return Err(irreducible("not an f-derivative"));
    }
    if a.derivs().iter().any(|v| single_t(v).is_none()) {
        return Err(irreducible("only t_n derivatives can be moved past f"));
    }
    let mut rest = a.derivs().to_vec();
    let v = rest.pop().expect("non-empty");
    Ok((v, rest))
}

fn split_first(w: &Word) -> Result<(&Atom, Word), WnaError> {
    match w.atoms().split_first() {
        Some((a, rest)) => Ok((a, Word(rest.to_vec()))),
        None => Err(WnaError::Invalid("nucleus elements have no constant term".into())),
    }
}

fn split_last(w: &Word) -> Result<(Word, &Atom), WnaError> {
    match w.atoms().split_last() {
        Some((a, init)) => Ok((Word(init.to_vec()), a)),
        None => Err(WnaError::Invalid("nucleus elements have no constant term".into())),
    }
}

fn sign(k: u32) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// `h_k` in f-derivatives: `p_k(∂̃)f`.
pub fn h_f_form(k: u32) -> NcExpr {
    schur_operator(k).apply(&f_d(&[]), &DerivationRules::standard()).expect("t derivatives are always defined")
}
