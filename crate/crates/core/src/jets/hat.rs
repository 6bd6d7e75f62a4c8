use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::ncpoly::VarIndex;
use crate::wna::{eth_operators, t_ones};
use crate::Q;

use super::matrix::MatrixJet;
use super::residual::apply_op;
use super::ring::{Jet, JetRing};
use super::JetError;

/// `t₁, t_{11}, …, t_{1^k}`
pub fn t_ones_ring(k: u32, degree: u32) -> Arc<JetRing> {
    JetRing::new((1..=k).map(t_ones), degree)
}

/// `exp(Σ_{k=2}^{K} t_k ð_k) φ` restricted to `t_{1^j} = 0` (j ≥ 2).
///
/// The result lives in a ring where `t₂ … t_K` replace the `t_{1^j}`. Its coefficient of
/// `t₁^{e₁} t₂^{e₂} …` needs coefficients of φ up to degree `Σ k e_k`, so the output is cut to
/// weighted degree ≤ D (weight of `t_k` is k), where it is exact.
pub fn hat_operator(phi: &MatrixJet, k_max: u32) -> Result<MatrixJet, JetError> {
    let ring = phi.ring();
    let d = ring.degree();
    let targets: Vec<VarIndex> = (2..=k_max).map(VarIndex::t).collect();
    if let Some(v) = targets.iter().find(|v| ring.contains(v)) {
        return Err(JetError::Invalid(alloc::format!("{} is already a variable of the input ring", v)));
    }
    let combined = JetRing::new(ring.vars().iter().cloned().chain(targets.iter().cloned()), d);
    let eth = eth_operators(k_max.max(1));
    let start = phi.embed(&combined)?;
    let tk: Vec<Jet> = targets.iter().map(|v| Jet::var(&combined, v)).collect::<Result<_, _>>()?;

    // E = Σ t_k ð_k never raises the degree, and each power adds one t_k, so E^{D+1} = 0.
    let mut acc = start.clone();
    let mut term = start;
    for n in 1..=d {
        let mut next = MatrixJet::zeros(&combined, phi.rows(), phi.cols());
        for (i, t) in tk.iter().enumerate() {
            next = next.add(&apply_op(&eth[i + 1], &term).scale_jet(t));
        }
        term = next.scale(&Q::new(1.into(), n.into()));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }

    let deformations: Vec<VarIndex> = ring
        .vars()
        .iter()
        .filter(|v| matches!(v, VarIndex::Composition(w) if w.len() > 1 && w.iter().all(|&m| m == 1)))
        .cloned()
        .collect();
    let restricted = acc.restrict_zero(&deformations);
    let out_ring = JetRing::new(combined.vars().iter().filter(|v| !deformations.contains(v)).cloned(), d);
    let weights: Vec<u32> = out_ring.vars().iter().map(weight).collect();
    Ok(restricted.embed(&out_ring)?.truncated_weighted(&weights, d))
}

/// `t_k` has weight k; every other variable weight 1.
pub fn weight(v: &VarIndex) -> u32 {
    match v {
        VarIndex::Composition(w) if w.len() == 1 => w[0],
        _ => 1,
    }
}
