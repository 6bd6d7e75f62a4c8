use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use super::expr::{Atom, NcExpr, Symbol, VarIndex};
use super::NcError;

pub const DEFAULT_MAX_ITER: usize = 10_000;

pub type DerivPredicate = Arc<dyn Fn(&[VarIndex]) -> bool + Send + Sync>;
pub type ComputedReplacement = Arc<dyn Fn(&Atom) -> Result<NcExpr, NcError> + Send + Sync>;

#[derive(Clone)]
pub enum Pattern {
    Exact(Atom),
    Symbol { symbol: Symbol, pred: DerivPredicate },
    /// Any indexed symbol with this base; the predicate sees the index.
    Family { base: String, pred: Arc<dyn Fn(u32) -> bool + Send + Sync> },
}

impl Pattern {
    pub fn matches(&self, a: &Atom) -> bool {
        match self {
            Pattern::Exact(p) => p == a,
            Pattern::Symbol { symbol, pred } => &a.symbol == symbol && pred(a.derivs()),
            Pattern::Family { base, pred } => {
                a.symbol.base == *base && a.symbol.index.is_some_and(|i| pred(i))
            }
        }
    }
}

#[derive(Clone)]
pub enum Replacement {
    Fixed(NcExpr),
    Computed(ComputedReplacement),
}

#[derive(Clone)]
pub struct RewriteRule {
    pub label: String,
    pub pattern: Pattern,
    pub replacement: Replacement,
}

impl RewriteRule {
    /// Replace one exact atom by a fixed expression.
    pub fn exact(from: Atom, to: NcExpr) -> Self {
        RewriteRule {
            label: alloc::format!("{}", NcExpr::atom(from.clone())),
            pattern: Pattern::Exact(from),
            replacement: Replacement::Fixed(to),
        }
    }

    pub fn computed<P, F>(label: &str, symbol: Symbol, pred: P, f: F) -> Self
    where
        P: Fn(&[VarIndex]) -> bool + Send + Sync + 'static,
        F: Fn(&Atom) -> Result<NcExpr, NcError> + Send + Sync + 'static,
    {
        RewriteRule {
            label: label.into(),
            pattern: Pattern::Symbol { symbol, pred: Arc::new(pred) },
            replacement: Replacement::Computed(Arc::new(f)),
        }
    }

    pub fn apply_to(&self, a: &Atom) -> Result<Option<NcExpr>, NcError> {
        if !self.pattern.matches(a) {
            return Ok(None);
        }
        match &self.replacement {
            Replacement::Fixed(e) => Ok(Some(e.clone())),
            Replacement::Computed(f) => f(a).map(Some),
        }
    }
}

impl fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RewriteRule").field("label", &self.label).finish()
    }
}

/// Result of a traced fixpoint run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteOutcome {
    pub expr: NcExpr,
    pub firings: usize,
    /// Firings per rule index.
    pub fired: BTreeMap<usize, usize>,
}

/// Apply `rules` until nothing fires; see [`rewrite_fixpoint_traced`].
pub fn rewrite_fixpoint(e: &NcExpr, rules: &[RewriteRule], max_iter: usize) -> Result<NcExpr, NcError> {
    rewrite_fixpoint_traced(e, rules, max_iter).map(|o| o.expr)
}

/// Each pass rewrites every atom matched by the first applicable rule (rules tried left to right).
/// A firing is one distinct atom rewritten in one pass.
pub fn rewrite_fixpoint_traced(
    e: &NcExpr,
    rules: &[RewriteRule],
    max_iter: usize,
) -> Result<RewriteOutcome, NcError> {
    let mut cur = e.clone();
    let mut firings = 0usize;
    let mut fired: BTreeMap<usize, usize> = BTreeMap::new();
    loop {
        let mut memo: BTreeMap<Atom, Option<NcExpr>> = BTreeMap::new();
        let mut pass_firings = 0usize;
        for a in cur.atoms() {
            let mut hit = None;
            for (i, r) in rules.iter().enumerate() {
                if let Some(rep) = r.apply_to(&a)? {
                    hit = Some(rep);
                    *fired.entry(i).or_insert(0) += 1;
                    pass_firings += 1;
                    break;
                }
            }
            memo.insert(a, hit);
        }
        if pass_firings == 0 {
            return Ok(RewriteOutcome { expr: cur, firings, fired });
        }
        cur = cur.substitute(|a| memo.get(a).cloned().flatten());
        firings += pass_firings;
        if firings > max_iter {
            return Err(NcError::NonTermination { residual: cur, firings });
        }
    }
}
