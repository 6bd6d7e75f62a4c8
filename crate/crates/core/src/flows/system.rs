use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::ncpoly::{
    apply_derivative, apply_derivatives, rat, rewrite_fixpoint_traced, NcExpr, Pattern, Replacement, RewriteRule,
    Symbol, VarIndex, DEFAULT_MAX_ITER,
};

use super::constants::{expand_constants, ConstantSpec};
use super::ideal::{ideal_certificate, IdealTerm};
use super::rhs::{composition_flow_rhs, moyal_flow_rhs, riccati_rhs, MoyalForm};
use super::FlowError;
use crate::ncpoly::DerivationRules;

/// A flow: the dynamic symbol and the variable it evolves in.
pub type FlowKey = (Symbol, VarIndex);

pub fn flow_key(symbol: &str, var: VarIndex) -> FlowKey {
    (Symbol::new(symbol), var)
}

#[derive(Clone, Debug)]
pub struct FlowSystem {
    entries: BTreeMap<FlowKey, NcExpr>,
    pub constants: ConstantSpec,
    pub rules: DerivationRules,
    pub max_iter: usize,
}

/// Outcome of reducing an expression by a flow system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub expr: NcExpr,
    pub used: BTreeSet<FlowKey>,
    pub firings: usize,
}

impl FlowSystem {
    pub fn new(constants: ConstantSpec) -> Self {
        FlowSystem { entries: BTreeMap::new(), constants, rules: DerivationRules::standard(), max_iter: DEFAULT_MAX_ITER }
    }

    /// Riccati flows `φ_{t_n}` for each listed n.
    pub fn riccati(ns: &[u32], constants: ConstantSpec) -> Self {
        let mut s = FlowSystem::new(constants);
        for &n in ns {
            s.insert(Symbol::new("phi"), VarIndex::t(n), riccati_rhs(n));
        }
        s
    }

    /// Moyal-deformed KdV `u_t = −u_xxx + 3(u_x u + u u_x)` with its deformation flow
    /// `u_θ = ½(u_xx u − u u_xx)`, using x = t₁, t = t₃, θ = θ₁₃.
    pub fn nckdv() -> Self {
        let mut s = FlowSystem::new(ConstantSpec::GENERIC);
        let x = VarIndex::t(1);
        let u = NcExpr::sym("u");
        let ux = apply_derivative(&x, &u, &s.rules).expect("standard rules");
        let uxx = apply_derivative(&x, &ux, &s.rules).expect("standard rules");
        let uxxx = apply_derivative(&x, &uxx, &s.rules).expect("standard rules");
        let ut = -uxxx + (ux.mul(&u) + u.mul(&ux)).scale(&rat(3, 1));
        let uth = (uxx.mul(&u) - u.mul(&uxx)).scale(&rat(1, 2));
        s.insert(Symbol::new("u"), VarIndex::t(3), ut);
        s.insert(Symbol::new("u"), VarIndex::Theta(1, 3), uth);
        s
    }

    pub fn insert(&mut self, symbol: Symbol, var: VarIndex, rhs: NcExpr) {
        self.entries.insert((symbol, var), rhs);
    }

    /// Add the `θ_{mn}` flow of φ (stored under the canonical θ with the sign absorbed).
    pub fn add_moyal(&mut self, m: u32, n: u32, form: MoyalForm) -> Result<(), FlowError> {
        let (_, v) = VarIndex::theta(m, n)?;
        self.insert(Symbol::new("phi"), v, moyal_flow_rhs(m.min(n), m.max(n), form));
        Ok(())
    }

    pub fn add_composition(&mut self, word: &[u32], unfold: bool) -> Result<(), FlowError> {
        if word.len() < 2 {
            return Err(FlowError::Invalid("composition flows need at least two indices".into()));
        }
        let v = VarIndex::composition(word)?;
        self.insert(Symbol::new("phi"), v, composition_flow_rhs(word, unfold));
        Ok(())
    }

    pub fn get(&self, key: &FlowKey) -> Result<&NcExpr, FlowError> {
        self.entries.get(key).ok_or_else(|| FlowError::MissingFlow(key.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FlowKey, &NcExpr)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> BTreeSet<FlowKey> {
        self.entries.keys().cloned().collect()
    }

    /// Substitution rules for the selected flows, highest variable first so that the rule list
    /// order fixes which flow eliminates an atom carrying several flow variables.
    fn flow_rules(&self, active: &BTreeSet<FlowKey>) -> (Vec<RewriteRule>, Vec<FlowKey>) {
        let mut keys: Vec<&FlowKey> = self.entries.keys().filter(|k| active.contains(*k)).collect();
        keys.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut rules = Vec::new();
        let mut labels = Vec::new();
        for key in keys {
            let (sym, var) = key.clone();
            let rhs = self.entries[key].clone();
            let drules = self.rules.clone();
            let pv = var.clone();
            let rule = RewriteRule {
                label: alloc::format!("{}_{}", sym, var),
                pattern: Pattern::Symbol { symbol: sym.clone(), pred: Arc::new(move |ds: &[VarIndex]| ds.contains(&pv)) },
                replacement: Replacement::Computed(Arc::new(move |a| {
                    let rest = a.without_deriv(&var).expect("pattern guarantees the derivative");
                    apply_derivatives(rest.derivs(), &rhs, &drules)
                })),
            };
            rules.push(rule);
            labels.push(key.clone());
        }
        (rules, labels)
    }

    /// Substitute the selected flows (all when `active` is `None`) to a fixpoint, then expand
    /// the L, Q, R, S families.
    pub fn reduce(&self, e: &NcExpr, active: Option<&BTreeSet<FlowKey>>) -> Result<Reduction, FlowError> {
        let all;
        let active = match active {
            Some(a) => a,
            None => {
                all = self.keys();
                &all
            }
        };
        let (rules, labels) = self.flow_rules(active);
        let out = rewrite_fixpoint_traced(e, &rules, self.max_iter)?;
        let used = out.fired.keys().map(|i| labels[*i].clone()).collect();
        Ok(Reduction { expr: expand_constants(&out.expr, &self.constants), used, firings: out.firings })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommuteStatus {
    Commute,
    /// Zero only after substituting these further flows.
    Conditional(BTreeSet<FlowKey>),
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorReport {
    pub status: CommuteStatus,
    pub residual: NcExpr,
    pub used_flows: BTreeSet<FlowKey>,
    pub rule_firings: usize,
}

/// Reduce `∂_B(RHS_A) − ∂_A(RHS_B)`: first with the two flows alone, then with the full system.
pub fn check_commute(a: &FlowKey, b: &FlowKey, system: &FlowSystem) -> Result<CommutatorReport, FlowError> {
    let rhs_a = system.get(a)?;
    let rhs_b = system.get(b)?;
    if a.0 != b.0 {
        return Err(FlowError::Invalid("flows act on different symbols".into()));
    }
    let diff = apply_derivative(&b.1, rhs_a, &system.rules)? - apply_derivative(&a.1, rhs_b, &system.rules)?;
    let pair: BTreeSet<FlowKey> = [a.clone(), b.clone()].into_iter().collect();
    let first = system.reduce(&diff, Some(&pair))?;
    if first.expr.is_zero() {
        return Ok(CommutatorReport {
            status: CommuteStatus::Commute,
            residual: first.expr,
            used_flows: first.used,
            rule_firings: first.firings,
        });
    }
    let second = system.reduce(&first.expr, None)?;
    let mut used = first.used;
    used.extend(second.used.iter().cloned());
    let firings = first.firings + second.firings;
    let status = if second.expr.is_zero() {
        CommuteStatus::Conditional(second.used.difference(&pair).cloned().collect())
    } else {
        CommuteStatus::Fail
    };
    Ok(CommutatorReport { status, residual: second.expr, used_flows: used, rule_firings: firings })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub zero: bool,
    /// What remains after flow substitution and constraint elimination.
    pub residual: NcExpr,
    /// `candidate − target` after flow substitution, before constraints.
    pub reduced: NcExpr,
    pub used_flows: BTreeSet<FlowKey>,
    pub rule_firings: usize,
    /// Non-empty when constraints were needed: `reduced = Σ coeff · left · constraint · right`.
    pub certificate: Vec<IdealTerm>,
}

/// Longest multiplier word tried when eliminating with constraints.
pub const DEFAULT_CONSTRAINT_DEPTH: usize = 4;

/// Reduce `candidate − target` modulo the flow system and the constraints `c = 0`.
pub fn verify_identity(
    candidate: &NcExpr,
    target: &NcExpr,
    system: &FlowSystem,
    constraints: &[NcExpr],
) -> Result<IdentityReport, FlowError> {
    let diff = candidate - target;
    let red = system.reduce(&diff, None)?;
    if red.expr.is_zero() || constraints.is_empty() {
        return Ok(IdentityReport {
            zero: red.expr.is_zero(),
            residual: red.expr.clone(),
            reduced: red.expr,
            used_flows: red.used,
            rule_firings: red.firings,
            certificate: Vec::new(),
        });
    }
    let mut gens = Vec::with_capacity(constraints.len());
    let mut used = red.used;
    let mut firings = red.firings;
    for c in constraints {
        let r = system.reduce(c, None)?;
        used.extend(r.used);
        firings += r.firings;
        gens.push(r.expr);
    }
    let min_gen = gens.iter().filter(|g| !g.is_zero()).flat_map(|g| g.terms().map(|(w, _)| w.len())).min().unwrap_or(0);
    let depth = red.expr.degree().saturating_sub(min_gen).min(DEFAULT_CONSTRAINT_DEPTH);
    let cert = ideal_certificate(&red.expr, &gens, depth);
    Ok(IdentityReport {
        zero: cert.is_some(),
        residual: if cert.is_some() { NcExpr::zero() } else { red.expr.clone() },
        reduced: red.expr,
        used_flows: used,
        rule_firings: firings,
        certificate: cert.unwrap_or_default(),
    })
}
