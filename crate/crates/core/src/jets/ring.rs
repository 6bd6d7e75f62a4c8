use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::ncpoly::VarIndex;
use crate::Q;

use super::JetError;

/// Exponent vector, one entry per ring variable.
pub type Mono = Vec<u16>;

/// Variables (sorted, distinct) and the total-degree bound `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetRing {
    vars: Vec<VarIndex>,
    degree: u32,
}

impl JetRing {
    pub fn new<I: IntoIterator<Item = VarIndex>>(vars: I, degree: u32) -> Arc<JetRing> {
        let mut vars: Vec<VarIndex> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        Arc::new(JetRing { vars, degree })
    }

    /// `t_1, …, t_n`
    pub fn ordinary(n: u32, degree: u32) -> Arc<JetRing> {
        JetRing::new((1..=n).map(VarIndex::t), degree)
    }

    pub fn vars(&self) -> &[VarIndex] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn index_of(&self, v: &VarIndex) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }

    pub fn contains(&self, v: &VarIndex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn with_degree(&self, degree: u32) -> Arc<JetRing> {
        Arc::new(JetRing { vars: self.vars.clone(), degree })
    }

    pub(crate) fn unit_mono(&self) -> Mono {
        alloc::vec![0; self.vars.len()]
    }

    pub fn render_mono(&self, m: &[u16]) -> String {
        let mut s = String::new();
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('*');
            }
            let _ = write!(s, "{}", self.vars[i]);
            if e > 1 {
                let _ = write!(s, "^{}", e);
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

pub(crate) fn mono_degree(m: &[u16]) -> u32 {
    m.iter().map(|&e| u32::from(e)).sum()
}

pub(crate) fn same_ring(a: &Arc<JetRing>, b: &Arc<JetRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Truncated power series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    ring: Arc<JetRing>,
    terms: BTreeMap<Mono, Q>,
}

impl Jet {
    pub fn zero(ring: &Arc<JetRing>) -> Jet {
        Jet { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<JetRing>, c: Q) -> Jet {
        let mut j = Jet::zero(ring);
        j.add_term(ring.unit_mono(), c);
        j
    }

    pub fn one(ring: &Arc<JetRing>) -> Jet {
        Jet::constant(ring, Q::one())
    }

    pub fn var(ring: &Arc<JetRing>, v: &VarIndex) -> Result<Jet, JetError> {
        let i = ring.index_of(v).ok_or_else(|| JetError::UnknownVar(v.clone()))?;
        let mut m = ring.unit_mono();
        m[i] = 1;
        Ok(Jet::monomial(ring, m, Q::one()))
    }

    /// Dropped silently when above the truncation degree.
    pub fn monomial(ring: &Arc<JetRing>, m: Mono, c: Q) -> Jet {
        assert_eq!(m.len(), ring.len(), "exponent vector length");
        let mut j = Jet::zero(ring);
        j.add_term(m, c);
        j
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() || mono_degree(&m) > self.ring.degree {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u16]) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&self.ring.unit_mono())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| mono_degree(m) == 0)
    }

    /// Coefficient of a monomial given as `(variable, exponent)` pairs.
    pub fn coeff_of(&self, factors: &[(VarIndex, u16)]) -> Q {
        let mut m = self.ring.unit_mono();
        for (v, e) in factors {
            match self.ring.index_of(v) {
                Some(i) => m[i] += e,
                None => return Q::zero(),
            }
        }
        self.coeff(&m)
    }

    /// The lowest nonzero monomial in graded order, rendered.
    pub fn first_nonzero(&self) -> Option<(String, Q)> {
        self.terms
            .iter()
            .min_by(|a, b| mono_degree(a.0).cmp(&mono_degree(b.0)).then_with(|| b.0.cmp(a.0)))
            .map(|(m, c)| (self.ring.render_mono(m), c.clone()))
    }

    fn check(&self, other: &Jet) {
        assert!(same_ring(&self.ring, &other.ring), "jets from different rings");
    }

    pub fn add_scaled(&mut self, c: &Q, other: &Jet) {
        self.check(other);
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), c * d);
        }
    }

    pub fn scale(&self, c: &Q) -> Jet {
        if c.is_zero() {
            return Jet::zero(&self.ring);
        }
        Jet { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, d)| (m.clone(), c * d)).collect() }
    }

    /// Ordinary (commutative) product, truncated.
    pub fn mul(&self, other: &Jet) -> Jet {
        self.check(other);
        let d = self.ring.degree;
        let mut out = Jet::zero(&self.ring);
        for (a, ca) in &self.terms {
            let da = mono_degree(a);
            for (b, cb) in &other.terms {
                if da + mono_degree(b) > d {
                    continue;
                }
                let m: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Jet {
        let mut out = Jet::one(&self.ring);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative; zero when `v` is not a ring variable.
    pub fn derivative(&self, v: &VarIndex) -> Jet {
        match self.ring.index_of(v) {
            Some(i) => self.derivative_at(i),
            None => Jet::zero(&self.ring),
        }
    }

    pub(crate) fn derivative_at(&self, i: usize) -> Jet {
        let mut out = Jet::zero(&self.ring);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            out.add_term(m2, c * Q::from_integer(m[i].into()));
        }
        out
    }

    pub fn derivatives(&self, vars: &[VarIndex]) -> Jet {
        vars.iter().fold(self.clone(), |acc, v| acc.derivative(v))
    }

    /// Keep total degree ≤ `d`.
    pub fn truncated(&self, d: u32) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| mono_degree(m) <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Keep `Σ wᵢ eᵢ ≤ d`.
    pub fn truncated_weighted(&self, weights: &[u32], d: u32) -> Jet {
        let wdeg = |m: &Mono| m.iter().zip(weights).map(|(&e, &w)| u32::from(e) * w).sum::<u32>();
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| wdeg(m) <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Set the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[VarIndex]) -> Jet {
        let idx: Vec<usize> = vars.iter().filter_map(|v| self.ring.index_of(v)).collect();
        Jet {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| idx.iter().all(|&i| m[i] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-express in another ring; every variable that occurs must exist there.
    pub fn embed(&self, target: &Arc<JetRing>) -> Result<Jet, JetError> {
        let map: Vec<Option<usize>> = self.ring.vars.iter().map(|v| target.index_of(v)).collect();
        let mut out = Jet::zero(target);
        for (m, c) in &self.terms {
            let mut m2 = target.unit_mono();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => m2[j] = e,
                    None => return Err(JetError::UnknownVar(self.ring.vars[i].clone())),
                }
            }
            out.add_term(m2, c.clone());
        }
        Ok(out)
    }

    /// `Σ_{k≤D} (−u)^k / c₀` for `self = c₀(1 + u)`.
    pub fn inverse(&self) -> Result<Jet, JetError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(JetError::Singular);
        }
        let inv0 = c0.recip();
        let mut u = self.scale(&-&inv0);
        u.add_term(self.ring.unit_mono(), Q::one());
        // u = 1 − self/c₀ has no constant term, so the geometric series stops at D.
        let mut out = Jet::one(&self.ring);
        let mut pow = Jet::one(&self.ring);
        for _ in 0..self.ring.degree {
            pow = pow.mul(&u);
            if pow.is_zero() {
                break;
            }
            out.add_scaled(&Q::one(), &pow);
        }
        Ok(out.scale(&inv0))
    }

    /// `exp(self)` for a jet without constant term.
    pub fn exp(&self) -> Result<Jet, JetError> {
        if !self.constant_term().is_zero() {
            return Err(JetError::Invalid("exp needs a vanishing constant term".into()));
        }
        let mut out = Jet::one(&self.ring);
        let mut pow = Jet::one(&self.ring);
        for k in 1..=self.ring.degree {
            pow = pow.mul(self).scale(&Q::new(1.into(), k.into()));
            if pow.is_zero() {
                break;
            }
            out.add_scaled(&Q::one(), &pow);
        }
        Ok(out)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Mono, &Q)> = self.terms.iter().collect();
        terms.sort_by(|a, b| mono_degree(a.0).cmp(&mono_degree(b.0)).then_with(|| b.0.cmp(a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let mag = c.abs();
            let unit = mono_degree(m) == 0;
            if unit {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                f.write_str(&self.ring.render_mono(m))?;
            } else {
                write!(f, "{}*{}", mag, self.ring.render_mono(m))?;
            }
        }
        Ok(())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let mut out = self.clone();
        out.add_scaled(&Q::one(), o);
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let mut out = self.clone();
        out.add_scaled(&-Q::one(), o);
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        Jet::mul(self, o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(&-Q::one())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        &self + &o
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        &self - &o
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}
