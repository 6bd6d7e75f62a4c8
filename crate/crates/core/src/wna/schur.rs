use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_traits::{One, Signed, Zero};

use crate::ncpoly::{apply_derivatives, DerivationRules, NcError, NcExpr, VarIndex};
use crate::Q;

/// Polynomial in commuting derivative operators; keys are sorted variable multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchurOp {
    terms: BTreeMap<Vec<VarIndex>, Q>,
}

impl SchurOp {
    pub fn zero() -> Self {
        SchurOp::default()
    }

    pub fn one() -> Self {
        SchurOp::monomial(Vec::new(), Q::one())
    }

    pub fn var(v: VarIndex) -> Self {
        SchurOp::monomial(alloc::vec![v], Q::one())
    }

    pub fn monomial(mut vars: Vec<VarIndex>, c: Q) -> Self {
        vars.sort();
        let mut s = SchurOp::zero();
        s.add_monomial(vars, c);
        s
    }

    fn add_monomial(&mut self, vars: Vec<VarIndex>, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(vars.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&vars);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<VarIndex>, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, vars: &[VarIndex]) -> Q {
        let mut key = vars.to_vec();
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SchurOp) -> SchurOp {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_monomial(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SchurOp) -> SchurOp {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> SchurOp {
        let mut out = SchurOp::zero();
        for (k, d) in &self.terms {
            out.add_monomial(k.clone(), c * d);
        }
        out
    }

    pub fn mul(&self, other: &SchurOp) -> SchurOp {
        let mut out = SchurOp::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let mut k = a.clone();
                k.extend(b.iter().cloned());
                k.sort();
                out.add_monomial(k, c * d);
            }
        }
        out
    }

    /// Act on an expression, each monomial as an iterated derivative.
    pub fn apply(&self, e: &NcExpr, rules: &DerivationRules) -> Result<NcExpr, NcError> {
        let mut out = NcExpr::zero();
        for (vars, c) in &self.terms {
            out.add_scaled(c, &apply_derivatives(vars, e, rules)?);
        }
        Ok(out)
    }
}

impl fmt::Display for SchurOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            let mag = c.abs();
            if k.is_empty() {
                let _ = write!(s, "{}", mag);
                continue;
            }
            if !mag.is_one() {
                let _ = write!(s, "{}*", mag);
            }
            s.push_str("D[");
            for (j, v) in k.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", v);
            }
            s.push(']');
        }
        f.write_str(&s)
    }
}

/// Elementary Schur polynomial `p_n(y₁, …, y_n)` with operator arguments, via
/// `n p_n = Σ_{j=1}^n j y_j p_{n−j}`.
pub fn schur_poly(n: usize, y: &[SchurOp]) -> SchurOp {
    let mut p = alloc::vec![SchurOp::one()];
    for k in 1..=n {
        let mut acc = SchurOp::zero();
        for j in 1..=k {
            if let Some(yj) = y.get(j - 1) {
                acc = acc.add(&yj.mul(&p[k - j]).scale(&Q::from_integer(j.into())));
            }
        }
        p.push(acc.scale(&Q::new(1.into(), k.into())));
    }
    p.swap_remove(n)
}

/// `p_n(∂̃)` with `∂̃ = (∂_{t₁}, ∂_{t₂}/2, ∂_{t₃}/3, …)`.
pub fn schur_operator(n: u32) -> SchurOp {
    let y: Vec<SchurOp> = (1..=n).map(|j| SchurOp::var(VarIndex::t(j)).scale(&Q::new(1.into(), j.into()))).collect();
    schur_poly(n as usize, &y)
}

/// `∂_{t_{1^k}}` as an operator variable.
pub fn t_ones(k: u32) -> VarIndex {
    if k == 1 {
        VarIndex::t(1)
    } else {
        VarIndex::Composition(alloc::vec![1; k as usize])
    }
}

/// `ð_k` in terms of `∂_{t₁}` and `∂_{t_{1ʲ}}`, obtained by solving
/// `∂_{t_{1^j}} = (−1)^j p_j(−ð̃)` for `j = 1..k` in turn.
pub fn eth_operator(k: u32) -> SchurOp {
    eth_operators(k).pop().expect("k >= 1")
}

/// `ð_1, …, ð_k`.
pub fn eth_operators(k: u32) -> Vec<SchurOp> {
    assert!(k >= 1, "eth operators start at 1");
    // y_j = −ð_j / j
    let mut y: Vec<SchurOp> = Vec::new();
    let mut eth = Vec::new();
    for j in 1..=k {
        let rest = schur_poly(j as usize, &y);
        let signed = SchurOp::var(t_ones(j)).scale(&sign(j));
        let yj = signed.sub(&rest);
        eth.push(yj.scale(&-Q::from_integer(j.into())));
        y.push(yj);
    }
    eth
}

fn sign(k: u32) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}
