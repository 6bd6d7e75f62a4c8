use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::NcError;
use crate::Q;

/// Base names whose atoms are constant in every hierarchy variable.
pub const CONSTANT_BASES: &[&str] = &["L", "Q", "R", "S", "K", "nu", "I"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub base: String,
    pub index: Option<u32>,
}

impl Symbol {
    pub fn new(base: &str) -> Self {
        Symbol { base: base.to_string(), index: None }
    }

    pub fn indexed(base: &str, index: u32) -> Self {
        Symbol { base: base.to_string(), index: Some(index) }
    }

    pub fn is_constant(&self) -> bool {
        CONSTANT_BASES.contains(&self.base.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}{{{}}}", self.base, i),
            None => f.write_str(&self.base),
        }
    }
}

/// A hierarchy variable: a composition word `t_{m1...mr}` or a Moyal parameter `θ_{mn}` with m<n.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarIndex {
    Composition(Vec<u32>),
    Theta(u32, u32),
}

impl VarIndex {
    /// The ordinary variable `t_n`.
    pub fn t(n: u32) -> Self {
        VarIndex::Composition(alloc::vec![n])
    }

    pub fn composition(word: &[u32]) -> Result<Self, NcError> {
        if word.is_empty() || word.contains(&0) {
            return Err(NcError::InvalidVar(alloc::format!("t{:?}", word)));
        }
        Ok(VarIndex::Composition(word.to_vec()))
    }

    /// `θ_{mn}` in canonical form; the sign is -1 when the arguments were swapped.
    pub fn theta(m: u32, n: u32) -> Result<(i32, Self), NcError> {
        if m == n || m == 0 || n == 0 {
            return Err(NcError::InvalidVar(alloc::format!("th{{{},{}}}", m, n)));
        }
        if m < n {
            Ok((1, VarIndex::Theta(m, n)))
        } else {
            Ok((-1, VarIndex::Theta(n, m)))
        }
    }

    pub fn is_ordinary(&self) -> bool {
        matches!(self, VarIndex::Composition(w) if w.len() == 1)
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarIndex::Composition(w) => {
                f.write_str("t{")?;
                for (i, m) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", m)?;
                }
                f.write_str("}")
            }
            VarIndex::Theta(m, n) => write!(f, "th{{{},{}}}", m, n),
        }
    }
}

fn cmp_multiset(a: &[VarIndex], b: &[VarIndex]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub symbol: Symbol,
    derivs: Vec<VarIndex>,
}

impl Atom {
    pub fn new(symbol: Symbol) -> Self {
        Atom { symbol, derivs: Vec::new() }
    }

    pub fn named(base: &str) -> Self {
        Atom::new(Symbol::new(base))
    }

    /// Atom with derivatives; `None` when a constant symbol would carry a derivative.
    pub fn with_derivs(symbol: Symbol, mut derivs: Vec<VarIndex>) -> Option<Self> {
        if symbol.is_constant() && !derivs.is_empty() {
            return None;
        }
        derivs.sort();
        Some(Atom { symbol, derivs })
    }

    pub fn derivs(&self) -> &[VarIndex] {
        &self.derivs
    }

    pub fn is_constant(&self) -> bool {
        self.symbol.is_constant()
    }

    /// Differentiate once more; `None` for constants.
    pub fn differentiated(&self, v: &VarIndex) -> Option<Atom> {
        if self.is_constant() {
            return None;
        }
        let mut derivs = self.derivs.clone();
        let pos = derivs.partition_point(|d| d <= v);
        derivs.insert(pos, v.clone());
        Some(Atom { symbol: self.symbol.clone(), derivs })
    }

    /// Remove one occurrence of `v` from the derivative multiset.
    pub fn without_deriv(&self, v: &VarIndex) -> Option<Atom> {
        let pos = self.derivs.iter().position(|d| d == v)?;
        let mut derivs = self.derivs.clone();
        derivs.remove(pos);
        Some(Atom { symbol: self.symbol.clone(), derivs })
    }

    pub fn base(&self) -> Atom {
        Atom::new(self.symbol.clone())
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbol
            .cmp(&other.symbol)
            .then_with(|| cmp_multiset(&self.derivs, &other.derivs))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Noncommutative monomial; ordered by length, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Atom>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An unnormalized term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Q,
    pub word: Word,
}

/// Canonical noncommutative polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NcExpr {
    terms: BTreeMap<Word, Q>,
}

impl NcExpr {
    pub fn zero() -> Self {
        NcExpr { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        NcExpr::scalar(Q::one())
    }

    pub fn scalar(c: Q) -> Self {
        let mut e = NcExpr::zero();
        e.add_term(c, Word::one());
        e
    }

    pub fn int(n: i64) -> Self {
        NcExpr::scalar(Q::from_integer(n.into()))
    }

    pub fn atom(a: Atom) -> Self {
        NcExpr::word(Word(alloc::vec![a]))
    }

    pub fn sym(base: &str) -> Self {
        NcExpr::atom(Atom::named(base))
    }

    pub fn word(w: Word) -> Self {
        let mut e = NcExpr::zero();
        e.add_term(Q::one(), w);
        e
    }

    /// Product of named symbols, e.g. `NcExpr::product(&["phi", "Q", "phi"])`.
    pub fn product(bases: &[&str]) -> Self {
        NcExpr::word(Word(bases.iter().map(|b| Atom::named(b)).collect()))
    }

    /// Collect raw terms into canonical form.
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut e = NcExpr::zero();
        for t in terms {
            e.add_term(t.coeff, t.word);
        }
        e
    }

    pub fn add_term(&mut self, c: Q, w: Word) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &NcExpr) {
        if c.is_zero() {
            return;
        }
        for (w, k) in &other.terms {
            self.add_term(c * k, w.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms.into_iter().map(|(word, coeff)| Term { coeff, word }).collect()
    }

    /// Already canonical by construction; kept as an explicit operation.
    pub fn normalize(&self) -> NcExpr {
        NcExpr::from_terms(self.clone().into_terms())
    }

    pub fn scale(&self, c: &Q) -> NcExpr {
        if c.is_zero() {
            return NcExpr::zero();
        }
        NcExpr { terms: self.terms.iter().map(|(w, k)| (w.clone(), k * c)).collect() }
    }

    pub fn mul(&self, other: &NcExpr) -> NcExpr {
        let mut out = NcExpr::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.add_term(ca * cb, wa.concat(wb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> NcExpr {
        let mut out = NcExpr::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Longest word length, 0 for scalars and zero.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Every distinct atom occurring in the expression.
    pub fn atoms(&self) -> alloc::collections::BTreeSet<Atom> {
        self.terms.keys().flat_map(|w| w.0.iter().cloned()).collect()
    }

    /// Replace each atom by the expression returned from `f` (or keep it when `f` yields `None`).
    pub fn substitute<F>(&self, mut f: F) -> NcExpr
    where
        F: FnMut(&Atom) -> Option<NcExpr>,
    {
        let mut out = NcExpr::zero();
        for (w, c) in &self.terms {
            let mut acc = NcExpr::scalar(c.clone());
            for a in &w.0 {
                let factor = f(a).unwrap_or_else(|| NcExpr::atom(a.clone()));
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            for (w2, c2) in acc.terms {
                out.add_term(c2, w2);
            }
        }
        out
    }

    /// Leading term in the canonical order (largest word).
    pub fn leading(&self) -> Option<(&Word, &Q)> {
        self.terms.iter().next_back()
    }
}

impl From<Atom> for NcExpr {
    fn from(a: Atom) -> Self {
        NcExpr::atom(a)
    }
}

impl Add for &NcExpr {
    type Output = NcExpr;
    fn add(self, rhs: &NcExpr) -> NcExpr {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(c.clone(), w.clone());
        }
        out
    }
}

impl Add for NcExpr {
    type Output = NcExpr;
    fn add(mut self, rhs: NcExpr) -> NcExpr {
        for (w, c) in rhs.terms {
            self.add_term(c, w);
        }
        self
    }
}

impl Sub for &NcExpr {
    type Output = NcExpr;
    fn sub(self, rhs: &NcExpr) -> NcExpr {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(-c.clone(), w.clone());
        }
        out
    }
}

impl Sub for NcExpr {
    type Output = NcExpr;
    fn sub(mut self, rhs: NcExpr) -> NcExpr {
        for (w, c) in rhs.terms {
            self.add_term(-c, w);
        }
        self
    }
}

impl Neg for &NcExpr {
    type Output = NcExpr;
    fn neg(self) -> NcExpr {
        NcExpr { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect() }
    }
}

impl Neg for NcExpr {
    type Output = NcExpr;
    fn neg(self) -> NcExpr {
        -&self
    }
}

impl Mul for &NcExpr {
    type Output = NcExpr;
    fn mul(self, rhs: &NcExpr) -> NcExpr {
        NcExpr::mul(self, rhs)
    }
}

/// `p/q` as an exact rational.
pub fn rat(p: i64, q: i64) -> Q {
    Q::new(p.into(), q.into())
}
