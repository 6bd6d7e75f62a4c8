use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use num_traits::{One, Zero};

use crate::ncpoly::{rat, VarIndex};
use crate::Q;

use super::matrix::MatrixJet;
use super::ring::{mono_degree, same_ring, Jet, JetRing, Mono};
use super::JetError;

/// Value of a Moyal parameter `θ_{mn}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaParam {
    /// The ring variable `th{m,n}`.
    Formal,
    Value(Q),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarSpec {
    Ordinary,
    /// `exp(½ Σ θ_{mn} ∂_{t_m} ⊗ ∂_{t_n})`, keyed by `(m, n)` with `m < n`.
    Moyal(BTreeMap<(u32, u32), ThetaParam>),
    /// `∗_n`: every ring variable `t_{m₁…m_r}` with `2 ≤ r ≤ n` is a deformation parameter.
    Composed(u32),
}

impl StarSpec {
    /// All `θ_{mn}` variables of the ring, formal.
    pub fn moyal_formal(ring: &JetRing) -> StarSpec {
        let mut map = BTreeMap::new();
        for v in ring.vars() {
            if let VarIndex::Theta(m, n) = v {
                map.insert((*m, *n), ThetaParam::Formal);
            }
        }
        StarSpec::Moyal(map)
    }

    pub fn is_ordinary(&self) -> bool {
        match self {
            StarSpec::Ordinary => true,
            StarSpec::Moyal(map) => map.values().all(|p| matches!(p, ThetaParam::Value(q) if q.is_zero())),
            StarSpec::Composed(n) => *n <= 1,
        }
    }
}

impl fmt::Display for StarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarSpec::Ordinary => f.write_str("ordinary"),
            StarSpec::Moyal(map) => {
                f.write_str("moyal(")?;
                for (i, ((m, n), p)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match p {
                        ThetaParam::Formal => write!(f, "th{{{},{}}}", m, n)?,
                        ThetaParam::Value(q) => write!(f, "th{{{},{}}}={}", m, n, q)?,
                    }
                }
                f.write_str(")")
            }
            StarSpec::Composed(n) => write!(f, "composed:{}", n),
        }
    }
}

/// One term `c · x_p · ∂_u ⊗ ∂_v` of a bidifferential exponent.
#[derive(Clone, Debug)]
struct Pairing {
    coeff: Q,
    param: Option<usize>,
    left: usize,
    right: usize,
}

/// A star product bound to a ring, with a memo of monomial products.
///
/// `a ⋆ b = m ∘ exp(B₂) ∘ … ∘ exp(B_n) (a ⊗ b)`; each layer's terms commute, and the
/// layers are applied innermost (longest parameters) first. Parameters multiply the left
/// copy: no later layer differentiates them, so the projection of the tensor product is moot.
#[derive(Debug)]
pub struct Star {
    ring: Arc<JetRing>,
    spec: StarSpec,
    layers: Vec<Vec<Pairing>>,
    memo: RefCell<BTreeMap<(Mono, Mono), Vec<(Mono, Q)>>>,
}

impl Star {
    pub fn new(ring: &Arc<JetRing>, spec: &StarSpec) -> Result<Star, JetError> {
        let mut layers = Vec::new();
        match spec {
            StarSpec::Ordinary => {}
            StarSpec::Moyal(map) => {
                let mut layer = Vec::new();
                for ((m, n), p) in map {
                    if m >= n {
                        return Err(JetError::Invalid(alloc::format!("theta pair ({}, {}) needs m < n", m, n)));
                    }
                    let (coeff, param) = match p {
                        ThetaParam::Formal => {
                            let v = VarIndex::Theta(*m, *n);
                            (Q::one(), Some(ring.index_of(&v).ok_or(JetError::UnknownVar(v))?))
                        }
                        ThetaParam::Value(q) => (q.clone(), None),
                    };
                    if coeff.is_zero() {
                        continue;
                    }
                    let (Some(a), Some(b)) = (ring.index_of(&VarIndex::t(*m)), ring.index_of(&VarIndex::t(*n))) else {
                        continue;
                    };
                    let half = &coeff * rat(1, 2);
                    layer.push(Pairing { coeff: half.clone(), param, left: a, right: b });
                    layer.push(Pairing { coeff: -half, param, left: b, right: a });
                }
                layers.push(layer);
            }
            StarSpec::Composed(level) => {
                for k in (2..=*level as usize).rev() {
                    let mut layer = Vec::new();
                    for (p, v) in ring.vars().iter().enumerate() {
                        let VarIndex::Composition(w) = v else { continue };
                        if w.len() != k {
                            continue;
                        }
                        for r in 1..k {
                            let u = VarIndex::Composition(w[..r].to_vec());
                            let s = VarIndex::Composition(w[r..].to_vec());
                            if let (Some(a), Some(b)) = (ring.index_of(&u), ring.index_of(&s)) {
                                layer.push(Pairing { coeff: Q::one(), param: Some(p), left: a, right: b });
                            }
                        }
                    }
                    layers.push(layer);
                }
            }
        }
        layers.retain(|l| !l.is_empty());
        Ok(Star { ring: ring.clone(), spec: spec.clone(), layers, memo: RefCell::new(BTreeMap::new()) })
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn spec(&self) -> &StarSpec {
        &self.spec
    }

    /// True when no bidifferential term survives in this ring.
    pub fn is_trivial(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        assert!(same_ring(a.ring(), &self.ring) && same_ring(b.ring(), &self.ring), "jets from a different ring");
        if self.is_trivial() || a.is_constant() || b.is_constant() {
            return a.mul(b);
        }
        let d = self.ring.degree();
        let mut out = Jet::zero(&self.ring);
        let b_terms: Vec<(&Mono, &Q, u32)> = b.terms().map(|(m, c)| (m, c, mono_degree(m))).collect();
        for (ma, ca) in a.terms() {
            let da = mono_degree(ma);
            for &(mb, cb, db) in &b_terms {
                if da + db > d && (da + db).saturating_sub(self.max_drop(ma, mb)) > d {
                    continue;
                }
                let c = ca * cb;
                self.with_monomial_product(ma, mb, |m, d| out.add_term(m.clone(), &c * d));
            }
        }
        out
    }

    /// Upper bound on the degree a product of these monomials can lose: each contraction
    /// removes one factor from each side and adds at most one parameter.
    fn max_drop(&self, a: &Mono, b: &Mono) -> u32 {
        self.layers
            .iter()
            .flatten()
            .map(|p| u32::from(a[p.left].min(b[p.right])) * if p.param.is_some() { 1 } else { 2 })
            .sum()
    }

    fn with_monomial_product(&self, a: &Mono, b: &Mono, mut f: impl FnMut(&Mono, &Q)) {
        if mono_degree(a) == 0 || mono_degree(b) == 0 {
            let m: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
            f(&m, &Q::one());
            return;
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = self.memo.borrow().get(&key) {
            for (m, c) in v {
                f(m, c);
            }
            return;
        }
        let v = self.monomial_product(a, b);
        for (m, c) in &v {
            f(m, c);
        }
        self.memo.borrow_mut().insert(key, v);
    }

    fn monomial_product(&self, a: &Mono, b: &Mono) -> Vec<(Mono, Q)> {
        let mut cur: BTreeMap<(Mono, Mono), Q> = BTreeMap::new();
        cur.insert((a.clone(), b.clone()), Q::one());
        for layer in &self.layers {
            for p in layer {
                cur = apply_pairing(cur, p);
            }
        }
        let mut out: BTreeMap<Mono, Q> = BTreeMap::new();
        for ((x, y), c) in cur {
            let m: Mono = x.iter().zip(&y).map(|(p, q)| p + q).collect();
            if mono_degree(&m) > self.ring.degree() {
                continue;
            }
            let slot = out.entry(m).or_insert_with(Q::zero);
            *slot += c;
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn mat_mul(&self, a: &MatrixJet, b: &MatrixJet) -> MatrixJet {
        a.mul_with(b, |x, y| self.mul(x, y))
    }

    /// Two-sided `⋆`-inverse by Newton iteration `B ← B + B⋆(I − A⋆B)`, seeded with the
    /// rational inverse of the constant term; the error degree doubles each step.
    pub fn inv(&self, a: &MatrixJet) -> Result<MatrixJet, JetError> {
        if a.rows() != a.cols() {
            return Err(JetError::Shape(alloc::format!("star inverse of a {}x{} matrix", a.rows(), a.cols())));
        }
        let c0 = a.constant_part().inverse().map_err(|_| JetError::Singular)?;
        let id = MatrixJet::identity(&self.ring, a.rows());
        let mut b = MatrixJet::from_rat(&self.ring, &c0);
        for _ in 0..=self.ring.degree() + 1 {
            let e = id.sub(&self.mat_mul(a, &b));
            if e.is_zero() {
                return Ok(b);
            }
            b = b.add(&self.mat_mul(&b, &e));
        }
        Err(JetError::Invalid("star inverse did not converge".into()))
    }

    pub fn inv_jet(&self, a: &Jet) -> Result<Jet, JetError> {
        Ok(self.inv(&MatrixJet::from_jet(a.clone()))?.scalar().clone())
    }
}

fn apply_pairing(cur: BTreeMap<(Mono, Mono), Q>, p: &Pairing) -> BTreeMap<(Mono, Mono), Q> {
    let mut out: BTreeMap<(Mono, Mono), Q> = BTreeMap::new();
    for ((x, y), c) in cur {
        let jmax = x[p.left].min(y[p.right]);
        let mut coef = c;
        for j in 0..=jmax {
            if j > 0 {
                // c^j/j! · (x_u)_j · (y_v)_j, built incrementally
                let jj = u32::from(j);
                coef = coef * &p.coeff * Q::from_integer(u32::from(x[p.left] - j + 1).into())
                    * Q::from_integer(u32::from(y[p.right] - j + 1).into())
                    / Q::from_integer(jj.into());
            }
            let mut x2 = x.clone();
            let mut y2 = y.clone();
            x2[p.left] -= j;
            y2[p.right] -= j;
            if let Some(q) = p.param {
                x2[q] += j;
            }
            let slot = out.entry((x2, y2)).or_insert_with(Q::zero);
            *slot += &coef;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn star_mul(a: &Jet, b: &Jet, spec: &StarSpec) -> Result<Jet, JetError> {
    if !same_ring(a.ring(), b.ring()) {
        return Err(JetError::RingMismatch);
    }
    Ok(Star::new(a.ring(), spec)?.mul(a, b))
}

pub fn star_mul_matrix(a: &MatrixJet, b: &MatrixJet, spec: &StarSpec) -> Result<MatrixJet, JetError> {
    if !same_ring(a.ring(), b.ring()) {
        return Err(JetError::RingMismatch);
    }
    if a.cols() != b.rows() {
        return Err(JetError::Shape(alloc::format!("{}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok(Star::new(a.ring(), spec)?.mat_mul(a, b))
}

pub fn star_inv(a: &MatrixJet, spec: &StarSpec) -> Result<MatrixJet, JetError> {
    Star::new(a.ring(), spec)?.inv(a)
}
