use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::flows::{composition_flow_rhs, moyal_flow_rhs, Family as Fam, MoyalForm};
use crate::linalg::RatMatrix;
use crate::ncpoly::{Atom, NcExpr, VarIndex};
use crate::wna::{schur_operator, t_ones, SchurOp};
use crate::Q;

use super::matrix::MatrixJet;
use super::solution::Constants;
use super::star::Star;
use super::JetError;

/// Outcome of a residual check: zero through total degree `order_checked`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    pub residual_zero: bool,
    pub first_nonzero_monomial: Option<String>,
    pub order_checked: i64,
}

impl ResidualReport {
    pub fn of(residual: &MatrixJet, order_checked: i64) -> Self {
        let first = residual.first_nonzero().map(|(i, j, m, c)| alloc::format!("[{},{}] {}*{}", i, j, c, m));
        ResidualReport { residual_zero: first.is_none(), first_nonzero_monomial: first, order_checked }
    }
}

/// Truncation left meaningful after derivatives of total order `k`.
fn checked(phi: &MatrixJet, k: u32) -> i64 {
    i64::from(phi.ring().degree()) - i64::from(k)
}

fn cut(r: MatrixJet, order: i64) -> MatrixJet {
    if order < 0 {
        return MatrixJet::zeros(r.ring(), r.rows(), r.cols());
    }
    r.truncated(order as u32)
}

/// `∂_{t_n}φ − (S_n + L_nφ − φR_n − φ⋆Q_nφ)`, valid through degree `D − 1`.
pub fn residual_riccati(phi: &MatrixJet, n: u32, c: &Constants, star: &Star) -> (MatrixJet, i64) {
    let f = c.family(n);
    let rhs = MatrixJet::from_rat(phi.ring(), &f.s)
        .add(&phi.lmul_rat(&f.l))
        .sub(&phi.rmul_rat(&f.r))
        .sub(&star.mat_mul(phi, &phi.lmul_rat(&f.q)));
    let order = checked(phi, 1);
    (cut(phi.derivative(&VarIndex::t(n)).sub(&rhs), order), order)
}

/// Memo of `𝒲(i,j) = Lⁱ φ Rʲ`.
#[derive(Clone, Debug)]
pub struct SatoTable {
    phi: MatrixJet,
    l: RatMatrix,
    r: RatMatrix,
    memo: BTreeMap<(u32, u32), MatrixJet>,
}

impl SatoTable {
    pub fn new(phi: MatrixJet, l: RatMatrix, r: RatMatrix) -> Self {
        let mut memo = BTreeMap::new();
        memo.insert((0, 0), phi.clone());
        SatoTable { phi, l, r, memo }
    }

    pub fn phi(&self) -> &MatrixJet {
        &self.phi
    }

    pub fn w(&mut self, i: u32, j: u32) -> MatrixJet {
        if let Some(w) = self.memo.get(&(i, j)) {
            return w.clone();
        }
        let w = if j > 0 {
            self.w(i, j - 1).rmul_rat(&self.r)
        } else {
            self.w(i - 1, 0).lmul_rat(&self.l)
        };
        self.memo.insert((i, j), w.clone());
        w
    }
}

/// `𝒲(i,j)_{t_n} − [𝒲(i+n,j) − 𝒲(i,j+n) − Σ_{k<n} 𝒲(i,k) ⋆ Q 𝒲(n−k−1,j)]`.
pub fn residual_sato(table: &mut SatoTable, i: u32, j: u32, n: u32, q: &RatMatrix, star: &Star) -> (MatrixJet, i64) {
    let mut rhs = table.w(i + n, j).sub(&table.w(i, j + n));
    for k in 0..n {
        let right = table.w(n - k - 1, j).lmul_rat(q);
        rhs = rhs.sub(&star.mat_mul(&table.w(i, k), &right));
    }
    let order = checked(table.phi(), 1);
    (cut(table.w(i, j).derivative(&VarIndex::t(n)).sub(&rhs), order), order)
}

/// The four-term form for `Q = RK − KL`:
/// `𝒲(i,j)_{t_n} − [𝒲(i+n,j) − 𝒲(i,j+n) − 𝒲(i,n)⋆K𝒲(0,j) + 𝒲(i,0)⋆K𝒲(n,j)]`.
pub fn residual_sato_k(table: &mut SatoTable, i: u32, j: u32, n: u32, k: &RatMatrix, star: &Star) -> (MatrixJet, i64) {
    let rhs = table
        .w(i + n, j)
        .sub(&table.w(i, j + n))
        .sub(&star.mat_mul(&table.w(i, n), &table.w(0, j).lmul_rat(k)))
        .add(&star.mat_mul(&table.w(i, 0), &table.w(n, j).lmul_rat(k)));
    let order = checked(table.phi(), 1);
    (cut(table.w(i, j).derivative(&VarIndex::t(n)).sub(&rhs), order), order)
}

/// Apply a polynomial in commuting partial derivatives entrywise.
pub fn apply_op(op: &SchurOp, a: &MatrixJet) -> MatrixJet {
    let mut out = MatrixJet::zeros(a.ring(), a.rows(), a.cols());
    for (vars, c) in op.terms() {
        out = out.add(&a.derivatives(vars).scale(c));
    }
    out
}

fn op_order(op: &SchurOp) -> u32 {
    op.terms().map(|(v, _)| v.len() as u32).max().unwrap_or(0)
}

/// `p_n(−∂̃)`
pub fn schur_neg(n: u32) -> SchurOp {
    let mut out = SchurOp::zero();
    for (vars, c) in schur_operator(n).terms() {
        let c = if vars.len() % 2 == 0 { c.clone() } else { -c.clone() };
        out = out.add(&SchurOp::monomial(vars.clone(), c));
    }
    out
}

/// Potential KP equation in Schur form, as the difference of its two sides:
/// `p_{n+1}p_m φ − p_{m+1}p_n φ − Σ_{k<m} p_k p_n φ ⋆ Q p_{m−k} φ + Σ_{k<n} p_k p_m φ ⋆ Q p_{n−k} φ`
/// with every `p = p(−∂̃)`.
pub fn residual_pkp(phi: &MatrixJet, m: u32, n: u32, q: &RatMatrix, star: &Star) -> Result<(MatrixJet, i64), JetError> {
    if let Some(v) = (1..=m.max(n) + 1).map(VarIndex::t).find(|v| !phi.ring().contains(v)) {
        return Err(JetError::UnknownVar(v));
    }
    let p: Vec<SchurOp> = (0..=m.max(n) + 1).map(schur_neg).collect();
    let lhs_a = p[n as usize + 1].mul(&p[m as usize]);
    let lhs_b = p[m as usize + 1].mul(&p[n as usize]);
    let mut res = apply_op(&lhs_a, phi).sub(&apply_op(&lhs_b, phi));
    let mut max_order = op_order(&lhs_a).max(op_order(&lhs_b));
    let mut side = |outer: u32, inner: u32, sign: &Q, res: &mut MatrixJet| {
        for k in 0..outer {
            let a_op = p[k as usize].mul(&p[inner as usize]);
            let b_op = &p[(outer - k) as usize];
            max_order = max_order.max(op_order(&a_op) + op_order(b_op));
            let prod = star.mat_mul(&apply_op(&a_op, phi), &apply_op(b_op, phi).lmul_rat(q));
            *res = res.add(&prod.scale(sign));
        }
    };
    side(m, n, &-Q::one(), &mut res);
    side(n, m, &Q::one(), &mut res);
    let order = checked(phi, max_order);
    Ok((cut(res, order), order))
}

/// `φ_{t_{1^{n+1}} t_{1^m}} − φ_{t_{1^{m+1}} t_{1^n}} − Σ_{k<n} φ_{t_{1^m} t_{1^k}} ⋆ Q φ_{t_{1^{n−k}}}
/// + Σ_{k<m} φ_{t_{1^n} t_{1^k}} ⋆ Q φ_{t_{1^{m−k}}}`, with `t_{1^0}` meaning no derivative.
pub fn residual_disguise(phi: &MatrixJet, m: u32, n: u32, q: &RatMatrix, star: &Star) -> (MatrixJet, i64) {
    let d = |ks: &[u32]| -> MatrixJet {
        let vars: Vec<VarIndex> = ks.iter().filter(|&&k| k > 0).map(|&k| t_ones(k)).collect();
        phi.derivatives(&vars)
    };
    let mut res = d(&[n + 1, m]).sub(&d(&[m + 1, n]));
    for k in 0..n {
        res = res.sub(&star.mat_mul(&d(&[m, k]), &d(&[n - k]).lmul_rat(q)));
    }
    for k in 0..m {
        res = res.add(&star.mat_mul(&d(&[n, k]), &d(&[m - k]).lmul_rat(q)));
    }
    let order = checked(phi, 2);
    (cut(res, order), order)
}

/// `∂_v φ` minus the flow right-hand side taken from the flows module: the derivative form
/// for `θ_{mn}`, the unexpanded composition flow for `t_{m₁…m_k}`, the Riccati flow for `t_n`.
pub fn residual_deformation(phi: &MatrixJet, flow: &VarIndex, c: &Constants, star: &Star) -> Result<(MatrixJet, i64), JetError> {
    let rhs = match flow {
        VarIndex::Theta(m, n) => moyal_flow_rhs(*m, *n, MoyalForm::Derivative),
        VarIndex::Composition(w) if w.len() == 1 => crate::flows::riccati_rhs(w[0]),
        VarIndex::Composition(w) => composition_flow_rhs(w, false),
    };
    let value = eval_on_jets(&rhs, phi, c, star)?;
    let order = checked(phi, 1);
    Ok((cut(phi.derivative(flow).sub(&value), order), order))
}

/// Evaluate an expression in `phi` (with derivatives), `L{n}`, `Q{n}`, `R{n}` and `S{n}`;
/// words are multiplied with the star product.
pub fn eval_on_jets(e: &NcExpr, phi: &MatrixJet, c: &Constants, star: &Star) -> Result<MatrixJet, JetError> {
    let mut cache: BTreeMap<Atom, MatrixJet> = BTreeMap::new();
    let mut out: Option<MatrixJet> = None;
    for (w, coeff) in e.terms() {
        let mut acc: Option<MatrixJet> = None;
        for a in w.atoms() {
            let v = match cache.get(a) {
                Some(v) => v.clone(),
                None => {
                    let v = atom_value(a, phi, c)?;
                    cache.insert(a.clone(), v.clone());
                    v
                }
            };
            acc = Some(match acc {
                None => v,
                Some(x) => {
                    if x.cols() != v.rows() {
                        return Err(JetError::Shape(alloc::format!("in word {}", NcExpr::word(w.clone()))));
                    }
                    star.mat_mul(&x, &v)
                }
            });
        }
        let term = acc.ok_or_else(|| JetError::Invalid("scalar term has no matrix shape".into()))?.scale(coeff);
        out = Some(match out {
            None => term,
            Some(o) => {
                if o.shape() != term.shape() {
                    return Err(JetError::Shape("terms of different shapes".into()));
                }
                o.add(&term)
            }
        });
    }
    Ok(out.unwrap_or_else(|| MatrixJet::zeros(phi.ring(), phi.rows(), phi.cols())))
}

fn atom_value(a: &Atom, phi: &MatrixJet, c: &Constants) -> Result<MatrixJet, JetError> {
    let ring = phi.ring();
    if a.symbol.base == "phi" {
        return Ok(phi.derivatives(a.derivs()));
    }
    let n = a.symbol.index.unwrap_or(1);
    let fam = Fam::from_base(&a.symbol.base).ok_or_else(|| JetError::Invalid(alloc::format!("no value for {}", a)))?;
    let f = c.family(n);
    let m = match fam {
        Fam::L => f.l,
        Fam::Q => f.q,
        Fam::R => f.r,
        Fam::S => f.s,
    };
    Ok(MatrixJet::from_rat(ring, &m))
}
